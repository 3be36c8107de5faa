#pragma once

#include <cstddef>
#include <string>

#include "wsnsel/errors.hpp"

namespace wsnsel {

// Lifetime extension factor: total sensors over sensors taking part in routing.
inline double ltef(std::size_t total_sensors, std::size_t participating) {
  if (participating < 1 || participating > total_sensors)
    throw contract_error("ltef needs 1 <= participating <= total, got " + std::to_string(participating) +
                         " of " + std::to_string(total_sensors));
  return static_cast<double>(total_sensors) / static_cast<double>(participating);
}

}  // namespace wsnsel
