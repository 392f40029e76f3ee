#pragma once

#include <cstdint>
#include <random>

namespace wordlap {

// Uniform double in [0, 1) built from the top 53 bits of the generator
// output. std::mt19937_64 output is fully specified by the standard, so
// sequences are identical across platforms for a given seed.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace wordlap
