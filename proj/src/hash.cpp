#include "pcm/hash.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "pcm/errors.hpp"

namespace pcm {

namespace {

std::string to_hex(const unsigned char* digest, unsigned len) {
  static const char* hexdig = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hexdig[digest[i] >> 4]);
    out.push_back(hexdig[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw error(errc::io_failure, "sha256 digest failed");
  }
  return to_hex(digest, len);
}

std::string sha16(std::string_view bytes) { return sha256_hex(bytes).substr(0, 16); }

std::string sha256_hex_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw error(errc::io_failure, "cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    std::fclose(f);
    throw error(errc::io_failure, "sha256 digest failed");
  }
  std::vector<char> buf(1 << 16);
  size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) {
    if (EVP_DigestUpdate(ctx.get(), buf.data(), n) != 1) {
      std::fclose(f);
      throw error(errc::io_failure, "sha256 digest failed");
    }
  }
  bool read_error = std::ferror(f) != 0;
  std::fclose(f);
  if (read_error) throw error(errc::io_failure, "read failed: " + path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw error(errc::io_failure, "sha256 digest failed");
  }
  return to_hex(digest, len);
}

}  // namespace pcm
