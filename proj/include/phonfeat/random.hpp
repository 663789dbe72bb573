#pragma once

#include <cstdint>
#include <random>

namespace phonfeat {

// All randomness in the toolkit flows through mt19937_64 plus this explicit
// 53-bit mantissa mapping, so identical seeds give identical values on every
// platform (std::uniform_real_distribution is implementation-defined).
inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(gen);
}

}  // namespace phonfeat
