#include <algorithm>
#include <istream>

#include "sgram/amr.hpp"

namespace sgram::amr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// "# ::id r1 ::snt Golden retriever" -> {id: r1, snt: Golden retriever}
void parse_metadata(std::string_view line,
                    std::map<std::string, std::string>& out) {
  line.remove_prefix(1);  // '#'
  std::size_t pos = line.find("::");
  while (pos != std::string_view::npos) {
    const std::size_t key_start = pos + 2;
    std::size_t key_end = key_start;
    while (key_end < line.size() && line[key_end] != ' ' &&
           line[key_end] != '\t') {
      ++key_end;
    }
    std::size_t next = line.find(" ::", key_end);
    const std::size_t value_end =
        next == std::string_view::npos ? line.size() : next;
    std::string key(line.substr(key_start, key_end - key_start));
    if (!key.empty()) {
      out[key] = std::string(
          trim(line.substr(key_end, value_end - key_end)));
    }
    pos = next == std::string_view::npos ? next : next + 1;
  }
}

}  // namespace

std::optional<std::string> PenmanBlock::id() const {
  auto it = metadata.find("id");
  if (it == metadata.end()) return std::nullopt;
  return it->second;
}

std::vector<PenmanBlock> read_penman_blocks(std::istream& in) {
  std::vector<PenmanBlock> blocks;
  PenmanBlock current;
  bool open = false;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (open && !trim(current.text).empty()) blocks.push_back(std::move(current));
    current = PenmanBlock{};
    open = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      current.line = line_no;
    }
    if (content.front() == '#') {
      parse_metadata(content, current.metadata);
      continue;
    }
    if (!current.text.empty()) current.text += '\n';
    current.text += line;
  }
  flush();
  return blocks;
}

}  // namespace sgram::amr
