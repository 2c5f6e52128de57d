#include "jscov/party.hpp"

#include <algorithm>
#include <cctype>

#include "jscov/errors.hpp"
#include "jscov/fsutil.hpp"

namespace jscov {

// Generated from third_party/publicsuffix at configure time.
extern const std::string_view kBuiltinPublicSuffixList;

namespace {

bool is_ipv4(std::string_view host) {
  int parts = 0;
  std::size_t pos = 0;
  while (pos <= host.size()) {
    const std::size_t dot = std::min(host.find('.', pos), host.size());
    const std::string_view part = host.substr(pos, dot - pos);
    if (part.empty() || part.size() > 3 ||
        !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        std::stoi(std::string(part)) > 255) {
      return false;
    }
    ++parts;
    pos = dot + 1;
  }
  return parts == 4;
}

bool is_ip_literal(std::string_view host) {
  return (host.size() > 2 && host.front() == '[' && host.back() == ']') || is_ipv4(host);
}

}  // namespace

std::string_view to_string(Party party) { return party == Party::kFirst ? "first" : "third"; }

const PublicSuffixList& PublicSuffixList::builtin() {
  static const PublicSuffixList list = from_text(kBuiltinPublicSuffixList);
  return list;
}

PublicSuffixList PublicSuffixList::from_text(std::string_view text) {
  PublicSuffixList list;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const std::size_t ws = line.find_first_of(" \t\r");
    if (ws != std::string_view::npos) line = line.substr(0, ws);
    if (line.empty() || line.starts_with("//")) continue;
    if (!std::all_of(line.begin(), line.end(), [](unsigned char c) { return c < 0x80; })) continue;
    std::string rule(line);
    std::transform(rule.begin(), rule.end(), rule.begin(), [](unsigned char c) { return std::tolower(c); });
    if (rule.starts_with("!")) {
      list.exceptions_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      list.wildcards_.insert(rule.substr(2));
    } else {
      list.rules_.insert(std::move(rule));
    }
  }
  return list;
}

PublicSuffixList PublicSuffixList::from_file(const std::filesystem::path& path) {
  return from_text(read_file(path));
}

std::string PublicSuffixList::public_suffix(std::string_view host) const {
  // Offsets where each suffix of the host starts, longest suffix first.
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < host.size(); ++i) {
    if (host[i] == '.') starts.push_back(i + 1);
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (exceptions_.contains(std::string(host.substr(starts[i])))) {
      return i + 1 < starts.size() ? std::string(host.substr(starts[i + 1])) : std::string(host);
    }
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::string suffix(host.substr(starts[i]));
    if (rules_.contains(suffix)) return suffix;
    if (i + 1 < starts.size() && wildcards_.contains(std::string(host.substr(starts[i + 1])))) return suffix;
  }
  return std::string(host.substr(starts.back()));
}

std::optional<std::string> PublicSuffixList::registrable_domain(std::string_view host) const {
  if (is_ip_literal(host)) return std::string(host);
  const std::string suffix = public_suffix(host);
  if (suffix.size() >= host.size()) return std::nullopt;
  const std::string_view head = host.substr(0, host.size() - suffix.size() - 1);
  const std::size_t dot = head.rfind('.');
  return std::string(host.substr(dot == std::string_view::npos ? 0 : dot + 1));
}

std::string normalize_host(std::string_view host) {
  std::string h(host);
  std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
  if (h.size() > 1 && h.back() == '.') h.pop_back();
  if (h.empty() || h.size() > 253) throw InvalidHost("invalid host '" + std::string(host) + "'");
  if (h.front() == '[') {
    const bool ok = h.size() > 2 && h.back() == ']' &&
                    std::all_of(h.begin() + 1, h.end() - 1, [](char c) {
                      return std::isxdigit(static_cast<unsigned char>(c)) || c == ':' || c == '.';
                    });
    if (!ok) throw InvalidHost("invalid IPv6 literal '" + std::string(host) + "'");
    return h;
  }
  std::size_t label_len = 0;
  for (std::size_t i = 0; i <= h.size(); ++i) {
    if (i == h.size() || h[i] == '.') {
      if (label_len == 0 || label_len > 63) throw InvalidHost("invalid host '" + std::string(host) + "'");
      label_len = 0;
      continue;
    }
    const char c = h[i];
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_')) {
      throw InvalidHost("invalid host '" + std::string(host) + "'");
    }
    ++label_len;
  }
  return h;
}

bool host_matches_pattern(std::string_view host, std::string_view pattern) {
  if (pattern.starts_with("*.")) {
    const std::string_view base = pattern.substr(1);  // ".example.com"
    return host.size() > base.size() && host.ends_with(base);
  }
  return host == pattern;
}

Party classify_party(std::string_view resource_host, std::string_view page_host,
                     const std::vector<std::string>& first_party_patterns, const PublicSuffixList& psl) {
  const std::string resource = normalize_host(resource_host);
  const std::string page = normalize_host(page_host);
  for (const auto& pattern : first_party_patterns) {
    std::string p(pattern);
    std::transform(p.begin(), p.end(), p.begin(), [](unsigned char c) { return std::tolower(c); });
    if (host_matches_pattern(resource, p)) return Party::kFirst;
  }
  if (resource == page) return Party::kFirst;
  const auto a = psl.registrable_domain(resource);
  const auto b = psl.registrable_domain(page);
  return a && b && *a == *b ? Party::kFirst : Party::kThird;
}

}  // namespace jscov
