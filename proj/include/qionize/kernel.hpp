#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qionize {

/// Channel weight K(kix, ksx) tabulated on a uniform grid that spans
/// [-k0, k0] in both transverse momenta. Nodes are stored in units of k0 so one
/// table serves any carrier. Values between nodes are bilinearly interpolated;
/// queries outside the grid clamp to the boundary.
class TabulatedKernel {
 public:
  TabulatedKernel(std::size_t n_i, std::size_t n_s, std::vector<double> values,
                  std::string label = "tabulated");

  double operator()(double kix, double ksx, double k0) const;

  std::size_t n_i() const { return n_i_; }
  std::size_t n_s() const { return n_s_; }
  const std::vector<double>& values() const { return values_; }
  const std::string& label() const { return label_; }

 private:
  std::size_t n_i_;
  std::size_t n_s_;
  std::vector<double> values_;  // row-major, row index over kix
  std::string label_;
};

/// Reads `kernel v1 n_i n_s` followed by n_i * n_s whitespace separated values.
TabulatedKernel parse_kernel(std::string_view text, std::string label = "tabulated");
TabulatedKernel load_kernel(const std::filesystem::path& path);
std::string serialize_kernel(const TabulatedKernel& kernel);

enum class SyntheticParity { Even, Odd };

/// Model kernels for symmetry checks only, with theta = asin(kx / k0):
///   Even: cos(theta_i) cos(theta_s)
///   Odd:  sin(theta_i - theta_s), antisymmetric under photon exchange.
double synthetic_kernel_value(SyntheticParity parity, double kix, double ksx, double k0);

/// Tabulates a synthetic kernel on an n x n grid.
TabulatedKernel make_synthetic_kernel(SyntheticParity parity, std::size_t n);

}  // namespace qionize
