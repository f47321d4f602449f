#include "qionize/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qionize {

double energy_to_wavenumber(double energy_ev) {
  if (!std::isfinite(energy_ev) || energy_ev <= 0.0) {
    throw std::domain_error("energy_to_wavenumber: energy must be positive, got " +
                            std::to_string(energy_ev));
  }
  return energy_ev / kHbarC_eV_um;
}

}  // namespace qionize
