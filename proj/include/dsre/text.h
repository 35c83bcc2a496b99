#ifndef DSRE_TEXT_H_
#define DSRE_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace dsre {

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> SplitWhitespace(std::string_view text);

std::string Join(const std::vector<std::string> &tokens,
                 std::string_view separator = " ");

// Lowercases and strips leading/trailing ASCII punctuation. "Sony," becomes
// "sony"; "co-founder" is left intact; "," becomes "".
std::string NormalizeToken(std::string_view token);

// True for tokens that normalize to the empty string or to an entry of the
// embedded English stop-word list.
bool IsStopWord(std::string_view token);

// The embedded stop-word list, sorted.
const std::vector<std::string_view> &StopWordList();

// Normalized tokens of `text`, empties dropped.
std::vector<std::string> NormalizedTokens(std::string_view text);

// Normalized tokens of `text` that are not stop words.
std::vector<std::string> ContentTokens(std::string_view text);

}  // namespace dsre

#endif  // DSRE_TEXT_H_
