#include "odf/random.hpp"

namespace odf {

std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view purpose,
                         std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t key = mix64(seed ^ mix64(stable_hash(purpose)));
  for (std::uint64_t c : coords) key = mix64(key ^ mix64(c + 0x632be59bd9b4e019ULL));
  return key;
}

RandomStream derive_stream(std::uint64_t seed, std::string_view purpose,
                           std::initializer_list<std::uint64_t> coords) {
  return RandomStream(stream_key(seed, purpose, coords));
}

double uniform01(RandomStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace odf
