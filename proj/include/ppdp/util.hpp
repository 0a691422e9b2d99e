#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppdp {

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

// Percent-encoding of everything outside [A-Za-z0-9._~-]; used for the
// per-user directory names so arbitrary email-style ids stay path-safe.
std::string url_encode(std::string_view s);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

// Writes via a temp file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

void append_line(const std::filesystem::path& path, std::string_view line);

// Big-endian integer packing for the snapshot wire format.
void put_be16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_be64(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint16_t get_be16(std::span<const std::uint8_t> in, std::size_t offset);
std::uint64_t get_be64(std::span<const std::uint8_t> in, std::size_t offset);

// Current wall-clock time as "YYYY-MM-DDTHH:MM:SSZ"; display only, never signed.
std::string iso8601_utc_now();

// An istream over caller-owned memory; the buffer must outlive the stream.
class MemStream {
 public:
  explicit MemStream(std::span<const std::uint8_t> bytes);
  explicit MemStream(std::string_view text);
  std::istream& stream() { return stream_; }

 private:
  struct Buf;
  std::unique_ptr<std::streambuf> buf_;
  std::istream stream_;
};

}  // namespace ppdp
