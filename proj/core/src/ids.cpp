#include "tlx/ids.hpp"

#include <sodium.h>

#include <stdexcept>
#include <vector>

namespace tlx {

namespace {

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

std::string random_token(std::size_t bytes) {
  ensure_sodium();
  std::vector<unsigned char> raw(bytes);
  randombytes_buf(raw.data(), raw.size());
  constexpr int variant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
  std::string out(sodium_base64_ENCODED_LEN(bytes, variant), '\0');
  sodium_bin2base64(out.data(), out.size(), raw.data(), raw.size(), variant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

std::string random_join_code() {
  ensure_sodium();
  std::string code(kJoinCodeLength, ' ');
  for (auto& c : code) {
    c = kJoinCodeAlphabet[randombytes_uniform(static_cast<std::uint32_t>(kJoinCodeAlphabet.size()))];
  }
  return code;
}

std::uint64_t random_seed() {
  ensure_sodium();
  std::uint64_t seed = 0;
  randombytes_buf(&seed, sizeof seed);
  return seed;
}

bool constant_time_equal(std::string_view a, std::string_view b) noexcept {
  // Length is not secret; the contents are.
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace tlx
