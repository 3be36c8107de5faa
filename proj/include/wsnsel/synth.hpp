#pragma once

#include <cstdint>
#include <string>

namespace wsnsel {

inline constexpr std::uint64_t kMiniSeed = 20040228;

struct synthetic_dataset {
  std::string log;        // raw deployment-log text
  std::string positions;  // "mote_id x y" lines
};

/// Small synthetic deployment used for end-to-end tests: six sensors
/// (3, 14, 16, 19, 39 and the sink 50) over 200 epochs, plus sensor 5 with
/// only 20 readings. For epoch e and sensor s, with u(s, e) a uniform value
/// in [-1, 1) from splitmix64(seed ^ (s * 1000003 + e)):
///
///   b(e) = sin(2 pi e / 96),  d(e) = cos(2 pi e / 37)
///   T50 = 21.0 + 1.5 b + 0.6 d + 0.05 u      T3  = 19.0 + 2.0 b + 0.10 u
///   T14 = 22.0 + 1.0 d + 0.10 u              T16 = 20.0 + 1.0 b + 0.5 d + 0.15 u
///   T19 = 18.0 + 0.8 u                       T39 = 19.5 + 1.9 b + 0.12 u
///   T5  = 20.0 + 0.3 u
///
/// Humidity, light and voltage are derived from the same terms. The log also
/// carries gaps (sensor 16 every 23rd epoch, sensor 14 at epoch 1), one
/// duplicated reading, one temperature-only line and two malformed lines.
synthetic_dataset make_mini_dataset(std::uint64_t seed = kMiniSeed);

}  // namespace wsnsel
