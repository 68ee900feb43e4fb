#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace quotecross {

// Incremental SHA-256 (FIPS 180-4); used for artifact digests in run
// reports so reruns can be compared byte-for-byte.
class Sha256 {
  public:
    Sha256();
    void update(const void* data, std::size_t len);
    std::string hex_digest();  // finalizes; further updates are invalid

  private:
    void process_block(const unsigned char* block);

    std::uint32_t state_[8];
    unsigned char buffer_[64];
    std::size_t buffered_ = 0;
    std::uint64_t total_bytes_ = 0;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);  // throws on I/O error

}  // namespace quotecross
