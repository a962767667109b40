#include "service/tar.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "common/error.hpp"

namespace speakloop::service {

namespace {

constexpr std::size_t kBlock = 512;

std::uint64_t ParseOctal(std::string_view field) {
  std::uint64_t v = 0;
  bool any = false;
  for (char c : field) {
    if (c == '\0' || c == ' ') {
      if (any) break;
      continue;
    }
    if (c < '0' || c > '7') Fail(ErrorKind::kFormat, "frames: tar header has a bad octal field");
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
    any = true;
  }
  return v;
}

std::string CString(std::string_view field) { return std::string(field.substr(0, field.find('\0'))); }

}  // namespace

std::map<std::string, std::string> ReadTar(std::string_view archive) {
  std::map<std::string, std::string> files;
  std::size_t pos = 0;
  std::string long_name;
  while (pos + kBlock <= archive.size()) {
    const std::string_view header = archive.substr(pos, kBlock);
    if (header.find_first_not_of('\0') == std::string_view::npos) break;  // end marker
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i)
      sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(header[i]);
    if (sum != ParseOctal(header.substr(148, 8))) Fail(ErrorKind::kFormat, "frames: tar header checksum mismatch");
    const std::uint64_t size = ParseOctal(header.substr(124, 12));
    const char type = header[156];
    std::string name = CString(header.substr(0, 100));
    if (header.substr(257, 5) == "ustar") {
      const std::string prefix = CString(header.substr(345, 155));
      if (!prefix.empty()) name = prefix + "/" + name;
    }
    pos += kBlock;
    if (pos + size > archive.size()) Fail(ErrorKind::kFormat, "frames: tar entry '" + name + "' is truncated");
    const std::string_view data = archive.substr(pos, size);
    pos += (size + kBlock - 1) / kBlock * kBlock;
    if (type == 'L') {  // GNU long name for the next entry
      long_name = CString(data);
      continue;
    }
    if (!long_name.empty()) {
      name = long_name;
      long_name.clear();
    }
    if (type != '0' && type != '\0') continue;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    if (name.empty() || name.front() == '.') continue;  // hidden and resource-fork files
    files[name] = std::string(data);
  }
  return files;
}

namespace {

void AppendEntry(std::string& out, std::string_view name, std::string_view data, char type) {
  char header[kBlock] = {};
  std::memcpy(header, name.data(), std::min<std::size_t>(name.size(), 100));
  std::snprintf(header + 100, 8, "%07o", 0644);
  std::snprintf(header + 108, 8, "%07o", 0);
  std::snprintf(header + 116, 8, "%07o", 0);
  std::snprintf(header + 124, 12, "%011llo", static_cast<unsigned long long>(data.size()));
  std::snprintf(header + 136, 12, "%011o", 0);
  header[156] = type;
  std::memcpy(header + 257, "ustar\0" "00", 8);
  std::memset(header + 148, ' ', 8);
  unsigned sum = 0;
  for (unsigned char c : header) sum += c;
  std::snprintf(header + 148, 8, "%06o", sum);
  header[155] = ' ';
  out.append(header, kBlock);
  out.append(data);
  out.append((kBlock - data.size() % kBlock) % kBlock, '\0');
}

}  // namespace

std::string WriteTar(const std::map<std::string, std::string>& files) {
  std::string out;
  for (const auto& [name, data] : files) {
    if (name.size() >= 100) AppendEntry(out, "././@LongLink", std::string(name) + '\0', 'L');
    AppendEntry(out, name, data, '0');
  }
  out.append(2 * kBlock, '\0');
  return out;
}

}  // namespace speakloop::service
