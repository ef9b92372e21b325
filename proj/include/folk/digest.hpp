#ifndef FOLK_DIGEST_HPP
#define FOLK_DIGEST_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace folk {

// Incremental SHA-256. Self-contained so digests are identical on every
// platform without linking a crypto library.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  void update(std::string_view s) { update(s.data(), s.size()); }
  std::array<std::uint8_t, 32> finish();

 private:
  void process_block(const std::uint8_t* block);

  std::array<std::uint32_t, 8> state_;
  std::array<std::uint8_t, 64> buffer_;
  std::uint64_t total_len_ = 0;
  std::size_t buffer_len_ = 0;
};

std::string to_hex(const std::array<std::uint8_t, 32>& digest);

std::string sha256_hex(std::string_view data);

// Digest of a file's bytes; throws StorageFailure if unreadable.
std::string sha256_file(const std::filesystem::path& path);

// Deterministic 64-bit key derived from (seed, name); used for seeded
// pseudo-random orderings that must be stable across platforms.
std::uint64_t keyed_hash64(std::uint64_t seed, std::string_view name);

}  // namespace folk

#endif  // FOLK_DIGEST_HPP
