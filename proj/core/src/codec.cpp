#include "jscov/codec.hpp"

#include <brotli/decode.h>
#include <brotli/encode.h>
#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <climits>

#include "jscov/errors.hpp"

namespace jscov {

namespace {

constexpr int kGzipWindowBits = 15 + 16;
constexpr std::size_t kChunk = 64 * 1024;

std::string gzip_compress(std::string_view in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, kGzipWindowBits, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("deflateInit2 failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(in.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const std::size_t written = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("gzip compression failed");
  out.resize(written);
  return out;
}

std::string gzip_decompress(std::string_view in) {
  z_stream zs{};
  if (inflateInit2(&zs, kGzipWindowBits) != Z_OK) throw DecodeError("inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  std::string out;
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    const std::size_t old = out.size();
    out.resize(old + kChunk);
    zs.next_out = reinterpret_cast<Bytef*>(out.data() + old);
    zs.avail_out = static_cast<uInt>(kChunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    out.resize(old + kChunk - zs.avail_out);
    if (rc == Z_STREAM_END) break;
    if (rc != Z_OK || (zs.avail_in == 0 && zs.avail_out != 0)) {
      inflateEnd(&zs);
      throw DecodeError("invalid or truncated gzip data");
    }
  }
  const bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) throw DecodeError("trailing bytes after gzip stream");
  return out;
}

std::string brotli_compress(std::string_view in) {
  std::string out;
  std::size_t size = BrotliEncoderMaxCompressedSize(in.size());
  if (size == 0) size = in.size() + 1024;
  out.resize(size);
  if (!BrotliEncoderCompress(BROTLI_DEFAULT_QUALITY, BROTLI_DEFAULT_WINDOW, BROTLI_MODE_TEXT, in.size(),
                             reinterpret_cast<const uint8_t*>(in.data()), &size,
                             reinterpret_cast<uint8_t*>(out.data()))) {
    throw Error("brotli compression failed");
  }
  out.resize(size);
  return out;
}

std::string brotli_decompress(std::string_view in) {
  BrotliDecoderState* st = BrotliDecoderCreateInstance(nullptr, nullptr, nullptr);
  if (st == nullptr) throw DecodeError("brotli decoder allocation failed");
  std::size_t avail_in = in.size();
  const auto* next_in = reinterpret_cast<const uint8_t*>(in.data());
  std::string out;
  BrotliDecoderResult rc = BROTLI_DECODER_RESULT_NEEDS_MORE_OUTPUT;
  while (rc == BROTLI_DECODER_RESULT_NEEDS_MORE_OUTPUT) {
    const std::size_t old = out.size();
    out.resize(old + kChunk);
    std::size_t avail_out = kChunk;
    auto* next_out = reinterpret_cast<uint8_t*>(out.data() + old);
    rc = BrotliDecoderDecompressStream(st, &avail_in, &next_in, &avail_out, &next_out, nullptr);
    out.resize(old + kChunk - avail_out);
  }
  BrotliDecoderDestroyInstance(st);
  if (rc != BROTLI_DECODER_RESULT_SUCCESS) throw DecodeError("invalid or truncated brotli data");
  if (avail_in != 0) throw DecodeError("trailing bytes after brotli stream");
  return out;
}

}  // namespace

std::string_view to_string(Encoding encoding) {
  switch (encoding) {
    case Encoding::kIdentity: return "identity";
    case Encoding::kGzip: return "gzip";
    case Encoding::kBrotli: return "br";
  }
  return "identity";
}

Encoding parse_encoding(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto first = t.find_first_not_of(" \t");
  const auto last = t.find_last_not_of(" \t");
  t = first == std::string::npos ? std::string() : t.substr(first, last - first + 1);
  if (t.empty() || t == "identity") return Encoding::kIdentity;
  if (t == "gzip" || t == "x-gzip") return Encoding::kGzip;
  if (t == "br") return Encoding::kBrotli;
  throw UnsupportedEncoding("unsupported content encoding '" + std::string(token) + "'");
}

std::string transcode(std::string_view decoded, Encoding target) {
  switch (target) {
    case Encoding::kIdentity: return std::string(decoded);
    case Encoding::kGzip: return gzip_compress(decoded);
    case Encoding::kBrotli: return brotli_compress(decoded);
  }
  throw UnsupportedEncoding("unsupported content encoding");
}

std::string transcode(std::string_view decoded, std::string_view target_token) {
  return transcode(decoded, parse_encoding(target_token));
}

std::string decode(std::string_view encoded, Encoding encoding) {
  switch (encoding) {
    case Encoding::kIdentity: return std::string(encoded);
    case Encoding::kGzip: return gzip_decompress(encoded);
    case Encoding::kBrotli: return brotli_decompress(encoded);
  }
  throw UnsupportedEncoding("unsupported content encoding");
}

}  // namespace jscov
