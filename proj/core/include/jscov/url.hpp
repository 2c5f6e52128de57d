#pragma once

#include <string>
#include <string_view>

namespace jscov {

// Parses "http(s)://host[:port]/path?query". Returns false on anything else.
struct UrlParts {
  std::string scheme;
  std::string host;  // lowercase, without port
  int port = 0;      // explicit or scheme default
  std::string target = "/";
};
bool parse_url(std::string_view url, UrlParts& out);

// Host of an http(s) URL, or empty.
std::string url_host(std::string_view url);

}  // namespace jscov
