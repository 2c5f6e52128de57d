#pragma once

#include <string>
#include <string_view>

namespace jscov {

enum class Encoding { kIdentity, kGzip, kBrotli };

std::string_view to_string(Encoding encoding);

// Content-Encoding token ("identity", "gzip", "x-gzip", "br"); case-insensitive.
// Throws UnsupportedEncoding.
Encoding parse_encoding(std::string_view token);

// Throws UnsupportedEncoding for an unknown token.
std::string transcode(std::string_view decoded, Encoding target);
std::string transcode(std::string_view decoded, std::string_view target_token);

// Throws DecodeError when the data is not valid for the encoding.
std::string decode(std::string_view encoded, Encoding encoding);

}  // namespace jscov
