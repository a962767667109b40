#pragma once

#include <map>
#include <string>
#include <string_view>

namespace speakloop::service {

// Regular-file entries of a ustar / v7 tar archive keyed by base name.
// Directories and other entry types are skipped. Throws kFormat on a bad
// header checksum or a truncated entry.
std::map<std::string, std::string> ReadTar(std::string_view archive);

// Minimal ustar writer (mode 0644, mtime 0) for fixtures and tests. Names of
// 100 bytes or more get a GNU long-name record.
std::string WriteTar(const std::map<std::string, std::string>& files);

}  // namespace speakloop::service
