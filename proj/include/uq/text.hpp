#pragma once

// Small text utilities used across scorers, graders, and the datastore.
// All functions are pure; case folding is ASCII-only by design since graders
// operate on constrained answer formats (letters, integers, short phrases).

#include <string>
#include <vector>

namespace uq::text {

// Strips leading and trailing ASCII whitespace.
std::string trim(const std::string& s);

std::string to_lower(const std::string& s);
std::string to_upper(const std::string& s);

// Splits on runs of ASCII whitespace; no empty tokens.
std::vector<std::string> split_ws(const std::string& s);

bool contains(const std::string& haystack, const std::string& needle);

// Hex-encoded SHA-256 of the input bytes.
std::string sha256_hex(const std::string& data);

// Removes trailing newline characters ('\n' and '\r') only. This is the
// normalization applied to prompt text before hashing for cache keys.
std::string trim_trailing_newlines(const std::string& s);

}  // namespace uq::text
