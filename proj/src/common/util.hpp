#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace speakloop {

// 64-bit FNV-1a. Used wherever a hash must be stable across platforms and
// runs (pseudonyms, state fingerprints), so std::hash is not an option.
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string HexDigest(std::uint64_t value);

// Rounds to 6 decimal places. Every float written into a canonical document
// goes through this so output is stable across libm implementations.
double Round6(double value);

std::string ReadFile(const std::filesystem::path& path);
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

// One entry per line, `#` starts a comment, blank lines ignored, entries
// lowercased and trimmed.
std::vector<std::string> ParseWordList(std::string_view text);

std::string Trim(std::string_view text);
std::string ToLower(std::string_view text);

// RFC 4180 CSV: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);

std::size_t Utf8Length(std::string_view text);

}  // namespace speakloop
