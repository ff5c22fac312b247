#ifndef SMC_DIGEST_HPP
#define SMC_DIGEST_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace smc {

using Bytes = std::vector<std::uint8_t>;

// FNV-1a 64-bit over a byte span. Stable across runs and platforms; used
// for result digests and duplicate-result comparison.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string digest_hex(std::uint64_t d) {
  static const char* hexdig = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hexdig[d & 0xf];
    d >>= 4;
  }
  return out;
}

inline void append_i64(Bytes& out, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

inline std::int64_t read_i64(std::span<const std::uint8_t> in, std::size_t off) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
  return static_cast<std::int64_t>(u);
}

inline void append_f64(Bytes& out, double v) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(v));
  __builtin_memcpy(&u, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

inline double read_f64(std::span<const std::uint8_t> in, std::size_t off) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
  double v;
  __builtin_memcpy(&v, &u, 8);
  return v;
}

}  // namespace smc

#endif
