#include "geostep/text_format.hpp"

#include <sstream>
#include <stdexcept>

namespace geostep {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string token; in >> token;) out.push_back(token);
  return out;
}

std::vector<DocumentEntry> parse_document(std::string_view text) {
  std::vector<DocumentEntry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      if (entries.empty()) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key: value'");
      }
      entries.back().rows.emplace_back(line);
      continue;
    }
    entries.push_back({std::string(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1))),
                       {}, line_no});
  }
  return entries;
}

}  // namespace geostep
