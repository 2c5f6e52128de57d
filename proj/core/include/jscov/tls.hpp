#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

typedef struct x509_st X509;
typedef struct evp_pkey_st EVP_PKEY;
typedef struct ssl_ctx_st SSL_CTX;

namespace jscov {

// Local certificate authority that mints one leaf certificate per host name,
// for terminating TLS on behalf of intercepted origins.
class CertificateAuthority {
 public:
  // PEM files. Throws Error.
  static std::shared_ptr<CertificateAuthority> load(const std::filesystem::path& cert_path,
                                                    const std::filesystem::path& key_path);
  static std::shared_ptr<CertificateAuthority> generate(std::string_view common_name, int valid_days = 3650);

  ~CertificateAuthority();
  CertificateAuthority(const CertificateAuthority&) = delete;
  CertificateAuthority& operator=(const CertificateAuthority&) = delete;

  // Throws IoError.
  void save(const std::filesystem::path& cert_path, const std::filesystem::path& key_path) const;
  std::string certificate_pem() const;

  // Leaf certificate for a DNS name or IP literal; minted once and cached.
  // The returned pointer stays valid for the lifetime of the authority.
  X509* leaf_for(std::string_view host);
  EVP_PKEY* leaf_key() const { return leaf_key_; }
  X509* certificate() const { return cert_; }

  // Installs a default leaf and an SNI callback that swaps in the leaf for
  // the requested server name. The authority must outlive the context.
  bool install(SSL_CTX& ctx);

  std::size_t minted_count() const;

 private:
  CertificateAuthority() = default;

  X509* cert_ = nullptr;
  EVP_PKEY* key_ = nullptr;
  EVP_PKEY* leaf_key_ = nullptr;
  mutable std::mutex mutex_;
  std::map<std::string, X509*, std::less<>> leaves_;
};

}  // namespace jscov
