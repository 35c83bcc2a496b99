#include "dsre/text.h"

#include <algorithm>
#include <cctype>

namespace dsre {

namespace {

// English function words. Fixed so mock entailment is identical on every
// machine; keep it sorted.
constexpr std::string_view kStopWords[] = {
    "a",       "about",   "above",      "after",    "again",   "against",
    "all",     "am",      "an",         "and",      "any",     "are",
    "as",      "at",      "be",         "because",  "been",    "before",
    "being",   "below",   "between",    "both",     "but",     "by",
    "can",     "could",   "did",        "do",       "does",    "doing",
    "down",    "during",  "each",       "few",      "for",     "from",
    "further", "had",     "has",        "have",     "having",  "he",
    "her",     "here",    "hers",       "herself",  "him",     "himself",
    "his",     "how",     "i",          "if",       "in",      "into",
    "is",      "it",      "its",        "itself",   "just",    "me",
    "more",    "most",    "my",         "myself",   "no",      "nor",
    "not",     "now",     "of",         "off",      "on",      "once",
    "only",    "or",      "other",      "our",      "ours",    "ourselves",
    "out",     "over",    "own",        "same",     "she",     "should",
    "so",      "some",    "such",       "than",     "that",    "the",
    "their",   "theirs",  "them",       "themselves", "then",  "there",
    "these",   "they",    "this",       "those",    "through", "to",
    "too",     "under",   "until",      "up",       "very",    "was",
    "we",      "were",    "what",       "when",     "where",   "which",
    "while",   "who",     "whom",       "whose",    "why",     "will",
    "with",    "would",   "you",        "your",     "yours",   "yourself",
    "yourselves",
};

}  // namespace

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string Join(const std::vector<std::string> &tokens,
                 std::string_view separator) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += separator;
    out += tokens[i];
  }
  return out;
}

std::string NormalizeToken(std::string_view token) {
  auto punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  };
  size_t b = 0, e = token.size();
  while (b < e && punct(token[b])) ++b;
  while (e > b && punct(token[e - 1])) --e;
  std::string out(token.substr(b, e - b));
  for (char &c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

const std::vector<std::string_view> &StopWordList() {
  static const std::vector<std::string_view> list(std::begin(kStopWords),
                                                  std::end(kStopWords));
  return list;
}

bool IsStopWord(std::string_view token) {
  std::string norm = NormalizeToken(token);
  if (norm.empty()) return true;
  return std::binary_search(std::begin(kStopWords), std::end(kStopWords),
                            std::string_view(norm));
}

std::vector<std::string> NormalizedTokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto &tok : SplitWhitespace(text)) {
    std::string norm = NormalizeToken(tok);
    if (!norm.empty()) out.push_back(std::move(norm));
  }
  return out;
}

std::vector<std::string> ContentTokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto &tok : NormalizedTokens(text)) {
    if (!IsStopWord(tok)) out.push_back(std::move(tok));
  }
  return out;
}

}  // namespace dsre
