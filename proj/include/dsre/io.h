#ifndef DSRE_IO_H_
#define DSRE_IO_H_

#include <functional>
#include <string>

#include "json.hpp"

namespace dsre {

// Calls `fn(line_number, line)` for every non-blank line. Throws Error when
// the file cannot be opened.
void ForEachLine(const std::string &path,
                 const std::function<void(int, const std::string &)> &fn);

// Parses every non-blank line as JSON; parse failures become ParseError with
// the offending line number.
void ForEachJsonLine(
    const std::string &path,
    const std::function<void(int, const nlohmann::json &)> &fn);

nlohmann::json ReadJsonFile(const std::string &path);

// Writes to a temporary sibling and renames it over `path`.
void WriteFileAtomic(const std::string &path, const std::string &contents);

bool FileExists(const std::string &path);

}  // namespace dsre

#endif  // DSRE_IO_H_
