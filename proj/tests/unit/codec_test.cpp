#include <gtest/gtest.h>

#include <random>

#include "jscov/codec.hpp"
#include "jscov/errors.hpp"

namespace jscov {
namespace {

std::string from_hex(std::string_view hex) {
  std::string out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out += static_cast<char>(std::stoi(std::string(hex.substr(i, 2)), nullptr, 16));
  }
  return out;
}

const std::string kPlain = "hello jscov\nhello jscov\nhello jscov\n";

TEST(Codec, DecodesReferenceStreams) {
  // Produced by Python's gzip and brotli modules.
  EXPECT_EQ(decode(from_hex("1f8b08000000000002ffcb48cdc9c957c82a4ece2fe3cac0c1060016448c0e24000000"),
                   Encoding::kGzip),
            kPlain);
  EXPECT_EQ(decode(from_hex("1b2300f81da9539fbb705d86a6362741d8ec5a618ced4d10150b28a9b50f"), Encoding::kBrotli),
            kPlain);
}

TEST(Codec, RoundTripsRandomData) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    std::string data(rng() % 70000, '\0');
    const bool compressible = i % 2 == 0;
    for (auto& c : data) c = static_cast<char>(compressible ? "abcde "[rng() % 6] : rng() % 256);
    for (auto e : {Encoding::kIdentity, Encoding::kGzip, Encoding::kBrotli}) {
      const std::string enc = transcode(data, e);
      EXPECT_EQ(decode(enc, e), data);
      if (compressible && data.size() > 1000 && e != Encoding::kIdentity) EXPECT_LT(enc.size(), data.size());
    }
  }
}

TEST(Codec, TokensAndNames) {
  EXPECT_EQ(parse_encoding("gzip"), Encoding::kGzip);
  EXPECT_EQ(parse_encoding("X-GZIP"), Encoding::kGzip);
  EXPECT_EQ(parse_encoding(" br "), Encoding::kBrotli);
  EXPECT_EQ(parse_encoding("identity"), Encoding::kIdentity);
  EXPECT_EQ(parse_encoding(""), Encoding::kIdentity);
  EXPECT_THROW(parse_encoding("deflate"), UnsupportedEncoding);
  EXPECT_THROW(parse_encoding("zstd"), UnsupportedEncoding);
  EXPECT_EQ(to_string(Encoding::kBrotli), "br");
  EXPECT_EQ(to_string(Encoding::kGzip), "gzip");
  EXPECT_EQ(to_string(Encoding::kIdentity), "identity");
  EXPECT_THROW(transcode("x", "compress"), UnsupportedEncoding);
  EXPECT_EQ(decode(transcode("x", "x-gzip"), Encoding::kGzip), "x");
}

TEST(Codec, CorruptInputIsADecodeError) {
  EXPECT_THROW(decode("definitely not gzip", Encoding::kGzip), DecodeError);
  EXPECT_THROW(decode("\xff\xff\xff\xff", Encoding::kBrotli), DecodeError);
  std::string truncated = transcode(std::string(5000, 'q'), Encoding::kGzip);
  truncated.resize(truncated.size() / 2);
  EXPECT_THROW(decode(truncated, Encoding::kGzip), DecodeError);
  std::string br = transcode(std::string(5000, 'q') + "tail", Encoding::kBrotli);
  br.resize(br.size() - 3);
  EXPECT_THROW(decode(br, Encoding::kBrotli), DecodeError);
}

TEST(Codec, EmptyBodies) {
  for (auto e : {Encoding::kIdentity, Encoding::kGzip, Encoding::kBrotli}) EXPECT_EQ(decode(transcode("", e), e), "");
}

}  // namespace
}  // namespace jscov
