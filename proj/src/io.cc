#include "dsre/io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsre/errors.h"

namespace dsre {

void ForEachLine(const std::string &path,
                 const std::function<void(int, const std::string &)> &fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(number, line);
  }
}

void ForEachJsonLine(
    const std::string &path,
    const std::function<void(int, const nlohmann::json &)> &fn) {
  ForEachLine(path, [&](int number, const std::string &line) {
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw ParseError(path, number, e.what());
    }
    try {
      fn(number, value);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(path, number, e.what());
    }
  });
}

nlohmann::json ReadJsonFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(path, 0, e.what());
  }
}

void WriteFileAtomic(const std::string &path, const std::string &contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw Error("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("rename " + tmp + " -> " + path + ": " + ec.message());
}

bool FileExists(const std::string &path) {
  return std::filesystem::exists(path);
}

}  // namespace dsre
