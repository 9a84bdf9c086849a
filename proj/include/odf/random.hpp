#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace odf {

/// The one random engine used everywhere. Streams are never shared between
/// threads; concurrent work derives its own stream with `derive_stream`.
using RandomStream = std::mt19937_64;

/// 64-bit FNV-1a. Stable across platforms, used to fold names and task ids
/// into stream keys.
std::uint64_t stable_hash(std::string_view text) noexcept;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines a seed, a purpose tag and any number of integer coordinates
/// into a 64-bit stream key. Order of the coordinates matters.
std::uint64_t stream_key(std::uint64_t seed, std::string_view purpose,
                         std::initializer_list<std::uint64_t> coords) noexcept;

RandomStream derive_stream(std::uint64_t seed, std::string_view purpose,
                           std::initializer_list<std::uint64_t> coords = {});

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform01(RandomStream& rng);

}  // namespace odf
