#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace tlx {

/// `bytes` of CSPRNG output in unpadded URL-safe base64.
std::string random_token(std::size_t bytes);

/// 128-bit identifier, 22 characters.
inline std::string random_id() { return random_token(16); }

/// Six characters from an alphabet without 0/O and 1/I.
std::string random_join_code();

std::uint64_t random_seed();

bool constant_time_equal(std::string_view a, std::string_view b) noexcept;

inline constexpr std::string_view kJoinCodeAlphabet = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
inline constexpr std::size_t kJoinCodeLength = 6;

}  // namespace tlx
