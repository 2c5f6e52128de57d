#include "jscov/tls.hpp"

#include <openssl/bn.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <cstdio>

#include "jscov/errors.hpp"

namespace jscov {

namespace {

std::string openssl_error(std::string_view what) {
  std::string msg(what);
  if (const unsigned long code = ERR_get_error(); code != 0) {
    char buf[256];
    ERR_error_string_n(code, buf, sizeof buf);
    msg += ": ";
    msg += buf;
  }
  ERR_clear_error();
  return msg;
}

EVP_PKEY* new_key() {
  EVP_PKEY* key = EVP_EC_gen("P-256");
  if (key == nullptr) throw Error(openssl_error("cannot generate EC key"));
  return key;
}

bool is_ip(std::string_view host) {
  if (host.find(':') != std::string_view::npos) return true;
  return !host.empty() && host.find_first_not_of("0123456789.") == std::string_view::npos;
}

void set_random_serial(X509* cert) {
  BIGNUM* bn = BN_new();
  BN_rand(bn, 63, BN_RAND_TOP_ANY, BN_RAND_BOTTOM_ANY);
  BN_to_ASN1_INTEGER(bn, X509_get_serialNumber(cert));
  BN_free(bn);
}

void add_ext(X509* cert, X509* issuer, int nid, const std::string& value) {
  X509V3_CTX ctx;
  X509V3_set_ctx_nodb(&ctx);
  X509V3_set_ctx(&ctx, issuer, cert, nullptr, nullptr, 0);
  X509_EXTENSION* ext = X509V3_EXT_conf_nid(nullptr, &ctx, nid, value.c_str());
  if (ext == nullptr) throw Error(openssl_error("cannot build certificate extension"));
  X509_add_ext(cert, ext, -1);
  X509_EXTENSION_free(ext);
}

X509* make_cert(std::string_view cn, EVP_PKEY* subject_key, X509* issuer, EVP_PKEY* issuer_key, int days,
                bool is_ca) {
  X509* cert = X509_new();
  X509_set_version(cert, 2);
  set_random_serial(cert);
  X509_gmtime_adj(X509_getm_notBefore(cert), -24L * 3600);
  X509_gmtime_adj(X509_getm_notAfter(cert), static_cast<long>(days) * 24 * 3600);
  X509_set_pubkey(cert, subject_key);
  X509_NAME* name = X509_get_subject_name(cert);
  const std::string cn_text(cn.substr(0, 64));
  X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_UTF8, reinterpret_cast<const unsigned char*>(cn_text.c_str()),
                             -1, -1, 0);
  if (is_ca) {
    X509_NAME_add_entry_by_txt(name, "O", MBSTRING_UTF8, reinterpret_cast<const unsigned char*>("jscov"), -1, -1,
                               0);
  }
  X509_set_issuer_name(cert, issuer ? X509_get_subject_name(issuer) : name);
  X509* issuer_cert = issuer ? issuer : cert;
  if (is_ca) {
    add_ext(cert, issuer_cert, NID_basic_constraints, "critical,CA:TRUE");
    add_ext(cert, issuer_cert, NID_key_usage, "critical,keyCertSign,cRLSign");
    add_ext(cert, issuer_cert, NID_subject_key_identifier, "hash");
  } else {
    add_ext(cert, issuer_cert, NID_basic_constraints, "critical,CA:FALSE");
    add_ext(cert, issuer_cert, NID_key_usage, "critical,digitalSignature,keyEncipherment");
    add_ext(cert, issuer_cert, NID_ext_key_usage, "serverAuth");
    std::string host(cn);
    if (host.size() > 2 && host.front() == '[') host = host.substr(1, host.size() - 2);
    add_ext(cert, issuer_cert, NID_subject_alt_name, (is_ip(host) ? "IP:" : "DNS:") + host);
  }
  if (X509_sign(cert, issuer_key, EVP_sha256()) == 0) {
    X509_free(cert);
    throw Error(openssl_error("cannot sign certificate"));
  }
  return cert;
}

int servername_callback(SSL* ssl, int* /*alert*/, void* arg) {
  auto* ca = static_cast<CertificateAuthority*>(arg);
  const char* name = SSL_get_servername(ssl, TLSEXT_NAMETYPE_host_name);
  if (name == nullptr || *name == '\0') return SSL_TLSEXT_ERR_NOACK;
  try {
    X509* leaf = ca->leaf_for(name);
    if (SSL_use_certificate(ssl, leaf) != 1 || SSL_use_PrivateKey(ssl, ca->leaf_key()) != 1 ||
        SSL_add1_chain_cert(ssl, ca->certificate()) != 1) {
      ERR_clear_error();
      return SSL_TLSEXT_ERR_ALERT_FATAL;
    }
  } catch (const std::exception&) {
    return SSL_TLSEXT_ERR_ALERT_FATAL;
  }
  return SSL_TLSEXT_ERR_OK;
}

}  // namespace

std::shared_ptr<CertificateAuthority> CertificateAuthority::load(const std::filesystem::path& cert_path,
                                                                 const std::filesystem::path& key_path) {
  std::shared_ptr<CertificateAuthority> ca(new CertificateAuthority());
  FILE* f = std::fopen(cert_path.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open CA certificate " + cert_path.string());
  ca->cert_ = PEM_read_X509(f, nullptr, nullptr, nullptr);
  std::fclose(f);
  if (ca->cert_ == nullptr) throw Error(openssl_error("cannot parse CA certificate " + cert_path.string()));
  f = std::fopen(key_path.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open CA key " + key_path.string());
  ca->key_ = PEM_read_PrivateKey(f, nullptr, nullptr, nullptr);
  std::fclose(f);
  if (ca->key_ == nullptr) throw Error(openssl_error("cannot parse CA key " + key_path.string()));
  if (X509_check_private_key(ca->cert_, ca->key_) != 1) {
    throw Error(openssl_error("CA key does not match CA certificate"));
  }
  ca->leaf_key_ = new_key();
  return ca;
}

std::shared_ptr<CertificateAuthority> CertificateAuthority::generate(std::string_view common_name, int valid_days) {
  std::shared_ptr<CertificateAuthority> ca(new CertificateAuthority());
  ca->key_ = new_key();
  ca->cert_ = make_cert(common_name, ca->key_, nullptr, ca->key_, valid_days, true);
  ca->leaf_key_ = new_key();
  return ca;
}

CertificateAuthority::~CertificateAuthority() {
  for (auto& [host, cert] : leaves_) X509_free(cert);
  X509_free(cert_);
  EVP_PKEY_free(key_);
  EVP_PKEY_free(leaf_key_);
}

void CertificateAuthority::save(const std::filesystem::path& cert_path, const std::filesystem::path& key_path) const {
  FILE* f = std::fopen(cert_path.c_str(), "wb");
  if (f == nullptr) throw IoError("cannot write " + cert_path.string());
  const bool cert_ok = PEM_write_X509(f, cert_) == 1;
  std::fclose(f);
  f = std::fopen(key_path.c_str(), "wb");
  if (f == nullptr) throw IoError("cannot write " + key_path.string());
  std::filesystem::permissions(key_path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  const bool key_ok = PEM_write_PrivateKey(f, key_, nullptr, nullptr, 0, nullptr, nullptr) == 1;
  std::fclose(f);
  if (!cert_ok || !key_ok) throw IoError(openssl_error("cannot write CA files"));
}

std::string CertificateAuthority::certificate_pem() const {
  BIO* bio = BIO_new(BIO_s_mem());
  PEM_write_bio_X509(bio, cert_);
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio, &data);
  std::string pem(data, static_cast<std::size_t>(len));
  BIO_free(bio);
  return pem;
}

X509* CertificateAuthority::leaf_for(std::string_view host) {
  std::lock_guard lock(mutex_);
  if (const auto it = leaves_.find(host); it != leaves_.end()) return it->second;
  X509* leaf = make_cert(host, leaf_key_, cert_, key_, 397, false);
  leaves_.emplace(std::string(host), leaf);
  return leaf;
}

bool CertificateAuthority::install(SSL_CTX& ctx) {
  try {
    X509* fallback = leaf_for("localhost");
    if (SSL_CTX_use_certificate(&ctx, fallback) != 1 || SSL_CTX_use_PrivateKey(&ctx, leaf_key_) != 1 ||
        SSL_CTX_add1_chain_cert(&ctx, cert_) != 1) {
      ERR_clear_error();
      return false;
    }
  } catch (const Error&) {
    return false;
  }
  SSL_CTX_set_min_proto_version(&ctx, TLS1_2_VERSION);
  SSL_CTX_set_tlsext_servername_callback(&ctx, servername_callback);
  SSL_CTX_set_tlsext_servername_arg(&ctx, this);
  return true;
}

std::size_t CertificateAuthority::minted_count() const {
  std::lock_guard lock(mutex_);
  return leaves_.size();
}

}  // namespace jscov
