#include "wsnsel/synth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace wsnsel {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(std::uint64_t seed, int sensor, int epoch, int stream = 0) {
  const auto key = static_cast<std::uint64_t>(sensor) * 1000003ULL + static_cast<std::uint64_t>(epoch) +
                   static_cast<std::uint64_t>(stream) * 0x100000000ULL;
  const auto bits = splitmix64(seed ^ key) >> 11;
  return static_cast<double>(bits) * 0x1.0p-52 - 1.0;
}

struct sensor_spec {
  int id;
  double x;
  double y;
  double base;
  double b_gain;
  double d_gain;
  double noise;
};

constexpr sensor_spec kSensors[] = {
    {3, 12.0, 6.0, 19.0, 2.0, 0.0, 0.10},   {5, 30.0, 4.0, 20.0, 0.0, 0.0, 0.30},
    {14, 20.0, 4.0, 22.0, 0.0, 1.0, 0.10},  {16, 16.0, 12.0, 20.0, 1.0, 0.5, 0.15},
    {19, 23.0, 18.0, 18.0, 0.0, 0.0, 0.80}, {39, 8.0, 10.0, 19.5, 1.9, 0.0, 0.12},
    {50, 4.0, 4.0, 21.0, 1.5, 0.6, 0.05},
};

constexpr int kEpochs = 200;
constexpr int kSparseEpochs = 20;

std::string timestamp(int epoch) {
  // 2004-02-28 00:00:00 plus 31 s per epoch, 5 fractional digits like the real log
  const long total = 31L * epoch;
  const long day = total / 86400;
  const long rem = total % 86400;
  return fmt::format("2004-02-{:02d} {:02d}:{:02d}:{:02d}.{:05d}", 28 + day, rem / 3600, (rem / 60) % 60, rem % 60,
                     (epoch * 7919) % 100000);
}

}  // namespace

synthetic_dataset make_mini_dataset(std::uint64_t seed) {
  synthetic_dataset out;
  std::ostringstream log;
  bool duplicated = false;

  for (int e = 1; e <= kEpochs; ++e) {
    const double b = std::sin(2.0 * std::numbers::pi * e / 96.0);
    const double d = std::cos(2.0 * std::numbers::pi * e / 37.0);
    for (const auto& s : kSensors) {
      if (s.id == 5 && e > kSparseEpochs) continue;
      if (s.id == 16 && e % 23 == 0) continue;
      if (s.id == 14 && e == 1) continue;

      const double temp = s.base + s.b_gain * b + s.d_gain * d + s.noise * uniform(seed, s.id, e);
      const double humidity = 40.0 - 0.5 * (temp - 20.0) + 0.2 * uniform(seed, s.id, e, 1);
      const double light = 100.0 + 50.0 * b + 5.0 * uniform(seed, s.id, e, 2);
      const double voltage = 2.7 - 0.0005 * e + 0.001 * uniform(seed, s.id, e, 3);

      const auto prefix = fmt::format("{} {} {}", timestamp(e), e, s.id);
      if (s.id == 19 && e == 100) {
        log << fmt::format("{} {:.4f}\n", prefix, temp);
        continue;
      }
      const auto line = fmt::format("{} {:.4f} {:.4f} {:.2f} {:.5f}\n", prefix, temp, humidity, light, voltage);
      log << line;
      if (s.id == 3 && e == 50 && !duplicated) {
        log << line;
        duplicated = true;
      }
    }
    if (e == 60) log << "2004-02-28 garbled line\n";
    if (e == 120) log << timestamp(e) << " " << e << "\n";
  }
  out.log = log.str();

  std::ostringstream pos;
  pos << "# mote_id x y (meters)\n";
  for (const auto& s : kSensors) pos << fmt::format("{} {:.1f} {:.1f}\n", s.id, s.x, s.y);
  out.positions = pos.str();
  return out;
}

}  // namespace wsnsel
