#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geostep {

/// One `key: value` entry of a line-based document. Lines without a colon
/// that follow an entry are collected as its continuation rows (used for
/// matrix blocks such as `gamma:`).
struct DocumentEntry {
  std::string key;
  std::string value;
  std::vector<std::string> rows;
  int line = 0;
};

/// Splits a document into entries; `#` starts a comment, blank lines are
/// skipped. Throws std::invalid_argument on a continuation row with no
/// preceding key.
std::vector<DocumentEntry> parse_document(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace geostep
