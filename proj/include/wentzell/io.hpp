#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace wentzell {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Sixteen lowercase hex digits.
std::string to_hex(std::uint64_t value);

/// FNV-1a of the file's bytes, as hex. Throws std::runtime_error if unreadable.
std::string hash_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

/// Writes the text atomically enough for our purposes: to a temporary
/// sibling, then renamed over the target.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

/// UTC time in ISO 8601.
std::string utc_timestamp();

}  // namespace wentzell
