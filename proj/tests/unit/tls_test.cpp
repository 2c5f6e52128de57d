#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <gtest/gtest.h>
#include <openssl/pem.h>
#include <openssl/x509v3.h>

#include "jscov/errors.hpp"
#include "jscov/fsutil.hpp"
#include "jscov/proxy.hpp"
#include "jscov/tls.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

bool signed_by(X509* leaf, X509* ca) {
  EVP_PKEY* key = X509_get_pubkey(ca);
  const bool ok = X509_verify(leaf, key) == 1;
  EVP_PKEY_free(key);
  return ok;
}

TEST(Tls, GeneratedAuthorityIsACa) {
  const auto ca = CertificateAuthority::generate("jscov test CA");
  X509* cert = ca->certificate();
  ASSERT_NE(cert, nullptr);
  EXPECT_EQ(X509_check_ca(cert), 1);
  EXPECT_TRUE(signed_by(cert, cert));
  EXPECT_NE(ca->certificate_pem().find("BEGIN CERTIFICATE"), std::string::npos);
}

TEST(Tls, LeavesCarryTheHostAndAreCached) {
  const auto ca = CertificateAuthority::generate("jscov test CA");
  X509* dns = ca->leaf_for("site.test");
  X509* ip = ca->leaf_for("127.0.0.1");
  ASSERT_NE(dns, nullptr);
  ASSERT_NE(ip, nullptr);
  EXPECT_EQ(X509_check_host(dns, "site.test", 0, 0, nullptr), 1);
  EXPECT_NE(X509_check_host(dns, "other.test", 0, 0, nullptr), 1);
  EXPECT_EQ(X509_check_ip_asc(ip, "127.0.0.1", 0), 1);
  EXPECT_TRUE(signed_by(dns, ca->certificate()));
  EXPECT_EQ(X509_check_ca(dns), 0);
  EXPECT_EQ(ca->minted_count(), 2u);
  EXPECT_EQ(ca->leaf_for("site.test"), dns);
  EXPECT_EQ(ca->minted_count(), 2u);
}

TEST(Tls, SaveAndLoadRoundTrip) {
  testing::TempDir dir;
  const auto ca = CertificateAuthority::generate("round trip");
  ca->save(dir.path() / "ca.pem", dir.path() / "ca.key");
  const auto loaded = CertificateAuthority::load(dir.path() / "ca.pem", dir.path() / "ca.key");
  EXPECT_EQ(loaded->certificate_pem(), ca->certificate_pem());
  EXPECT_TRUE(signed_by(loaded->leaf_for("x.test"), ca->certificate()));
  EXPECT_THROW(CertificateAuthority::load(dir.path() / "missing.pem", dir.path() / "ca.key"), Error);
  write_file_atomic(dir.path() / "junk.pem", "not a certificate");
  EXPECT_THROW(CertificateAuthority::load(dir.path() / "junk.pem", dir.path() / "ca.key"), Error);
}

TEST(Tls, HandshakeUsesTheLeafForTheRequestedName) {
  testing::TempDir dir;
  const auto ca = CertificateAuthority::generate("handshake CA");
  ca->save(dir.path() / "ca.pem", dir.path() / "ca.key");

  CoverageStore store;
  ResourceCache cache;
  const OriginFetcher fetcher = [](const std::string&, const std::string& url, const HeaderList&,
                                   const std::string&) {
    OriginResponse o;
    o.status = 200;
    o.headers = {{"Content-Type", "text/plain"}};
    o.body = "origin saw " + url;
    return o;
  };
  Proxy proxy(ProxyConfig{}, store, cache, fetcher);
  ProxyServer server(proxy);
  const int port = server.bind_https("127.0.0.1", 0, ca);
  server.start();

  for (const std::string host : {"site.test", "other.site.test"}) {
    httplib::SSLClient client(host, port);
    client.set_hostname_addr_map({{host, "127.0.0.1"}});
    client.set_ca_cert_path((dir.path() / "ca.pem").string());
    client.enable_server_certificate_verification(true);
    const auto res = client.Get("/page.txt");
    ASSERT_TRUE(res) << httplib::to_string(res.error());
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body, "origin saw https://" + host + ":" + std::to_string(port) + "/page.txt");
  }
  EXPECT_GE(ca->minted_count(), 2u);

  // Without the CA the minted leaf is refused.
  httplib::SSLClient untrusting("site.test", port);
  untrusting.set_hostname_addr_map({{"site.test", "127.0.0.1"}});
  untrusting.set_ca_cert_path((dir.path() / "missing.pem").string());
  untrusting.enable_server_certificate_verification(true);
  EXPECT_FALSE(untrusting.Get("/page.txt"));
  server.stop();
}

}  // namespace
}  // namespace jscov
