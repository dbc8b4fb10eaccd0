#pragma once

#include <string>
#include <string_view>

namespace pcm {

// hex-encoded SHA-256 of the given bytes
std::string sha256_hex(std::string_view bytes);

// first 16 hex chars of sha256_hex; used for short content fingerprints
std::string sha16(std::string_view bytes);

// SHA-256 of a file's raw bytes; throws error(errc::io_failure) if unreadable
std::string sha256_hex_file(const std::string& path);

}  // namespace pcm
