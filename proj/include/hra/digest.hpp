#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <type_traits>

namespace hra {

// 64-bit FNV-1a. Stable across platforms, used for state, observation and
// report digests.
class Fnv1a {
 public:
  static constexpr std::uint64_t kOffset = 14695981039346656037ULL;
  static constexpr std::uint64_t kPrime = 1099511628211ULL;

  Fnv1a& bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= kPrime;
    }
    return *this;
  }

  template <typename T>
    requires std::is_integral_v<T> || std::is_enum_v<T>
  Fnv1a& add(T v) {
    // Fixed little-endian 8-byte encoding so digests do not depend on T's width.
    auto u = static_cast<std::uint64_t>(v);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
    return bytes(buf, 8);
  }

  Fnv1a& add(std::string_view s) {
    add(s.size());
    return bytes(s.data(), s.size());
  }

  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = kOffset;
};

inline std::uint64_t fnv1a(std::string_view s) { return Fnv1a{}.bytes(s.data(), s.size()).value(); }

inline std::string hex_digest(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hra
