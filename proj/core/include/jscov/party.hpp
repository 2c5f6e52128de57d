#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace jscov {

enum class Party { kFirst, kThird };

std::string_view to_string(Party party);

// Public suffix list matcher (normal, wildcard and exception rules). Rules
// and hosts are compared in ASCII form; non-ASCII rules are ignored.
class PublicSuffixList {
 public:
  // The list compiled into the library.
  static const PublicSuffixList& builtin();
  static PublicSuffixList from_text(std::string_view text);
  static PublicSuffixList from_file(const std::filesystem::path& path);

  // Host must be normalized. Unlisted TLDs count as public suffixes.
  std::string public_suffix(std::string_view host) const;
  // Public suffix plus one label; nullopt when the host is itself a public
  // suffix. IP literals are their own registrable domain.
  std::optional<std::string> registrable_domain(std::string_view host) const;

  std::size_t rule_count() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;   // "*.foo.bar" stored as "foo.bar"
  std::unordered_set<std::string> exceptions_;  // "!a.foo.bar" stored as "a.foo.bar"
};

// Lowercases and strips one trailing dot. Throws InvalidHost for anything
// that is not a DNS name or IP literal (ports are not accepted).
std::string normalize_host(std::string_view host);

// "*.example.com" matches strict subdomains; anything else matches exactly.
bool host_matches_pattern(std::string_view host, std::string_view pattern);

// Throws InvalidHost.
Party classify_party(std::string_view resource_host, std::string_view page_host,
                     const std::vector<std::string>& first_party_patterns,
                     const PublicSuffixList& psl = PublicSuffixList::builtin());

}  // namespace jscov
