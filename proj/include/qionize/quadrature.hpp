#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace qionize {

enum class QuadratureMethod { AdaptiveSubdivision, TensorGauss };

std::string_view to_string(QuadratureMethod method);
QuadratureMethod parse_quadrature_method(std::string_view text);

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::AdaptiveSubdivision;
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  std::int64_t max_evals = 10'000'000;
  // Unused by the deterministic rules; kept so a spec fully describes a run.
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evals = 0;
  bool converged = false;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1]. The rules are open: no
/// integrand evaluation ever happens on the boundary.
struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
};

using Integrand2D = std::function<double(double x, double y)>;

/// Integrates f over the rectangle.
///
/// AdaptiveSubdivision applies a tensor Gauss-Kronrod 7/15 rule per cell and
/// repeatedly bisects the cell with the largest error estimate (ties broken by
/// lexicographic cell order), along the axis that carries most of that error.
/// TensorGauss refines a uniform grid of tensor Gauss-Legendre cells, doubling
/// the cell count per axis until two successive levels agree.
///
/// Running out of max_evals yields converged = false; it never throws for that.
/// Like any nodal rule it can miss a feature narrower than the node spacing that
/// passes between all nodes of a cell; align such ridges with an axis first.
IntegralResult integrate_2d(const Integrand2D& f, const Rect& domain,
                            const QuadratureSpec& spec);

/// Sum of independent integrals: values and error estimates add, converged is
/// the conjunction.
IntegralResult combine(const IntegralResult& a, const IntegralResult& b);

}  // namespace qionize
