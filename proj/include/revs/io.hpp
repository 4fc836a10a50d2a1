#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace revs {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);
std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes);

/// CRC-32C (Castagnoli).
std::uint32_t crc32c(std::span<const std::uint8_t> bytes);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::string& path);

}  // namespace revs
