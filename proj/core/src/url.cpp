#include "jscov/url.hpp"

#include <algorithm>
#include <cctype>

namespace jscov {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

bool parse_url(std::string_view url, UrlParts& out) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) return false;
  out.scheme = lower(url.substr(0, sep));
  if (out.scheme != "http" && out.scheme != "https") return false;
  std::string_view rest = url.substr(sep + 3);
  const auto slash = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, slash);
  std::string_view target = slash == std::string_view::npos ? std::string_view("/") : rest.substr(slash);
  target = target.substr(0, target.find('#'));
  if (authority.empty() || authority.find('@') != std::string_view::npos) return false;
  out.port = out.scheme == "https" ? 443 : 80;
  std::string_view host = authority;
  if (authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return false;
    host = authority.substr(0, close + 1);
    authority.remove_prefix(close + 1);
    if (!authority.empty() && authority.front() != ':') return false;
    if (!authority.empty()) authority.remove_prefix(1);
    else authority = {};
  } else if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    authority = authority.substr(colon + 1);
  } else {
    authority = {};
  }
  if (!authority.empty()) {
    int port = 0;
    for (char c : authority) {
      if (c < '0' || c > '9') return false;
      port = port * 10 + (c - '0');
      if (port > 65535) return false;
    }
    out.port = port;
  }
  if (host.empty()) return false;
  out.host = lower(host);
  out.target = target.empty() || target.front() == '?' ? "/" + std::string(target) : std::string(target);
  return true;
}

std::string url_host(std::string_view url) {
  UrlParts parts;
  return parse_url(url, parts) ? parts.host : std::string();
}

}  // namespace jscov
