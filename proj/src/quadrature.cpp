#include "qionize/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace qionize {

std::string_view to_string(QuadratureMethod method) {
  switch (method) {
    case QuadratureMethod::AdaptiveSubdivision:
      return "adaptive";
    case QuadratureMethod::TensorGauss:
      return "tensor_gauss";
  }
  return "unknown";
}

QuadratureMethod parse_quadrature_method(std::string_view text) {
  if (text == "adaptive") return QuadratureMethod::AdaptiveSubdivision;
  if (text == "tensor_gauss") return QuadratureMethod::TensorGauss;
  throw std::invalid_argument("quadrature.method: unknown method '" + std::string(text) +
                              "' (expected adaptive or tensor_gauss)");
}

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw std::invalid_argument("quadrature.rel_tol: must lie in (0, 1)");
  }
  if (!(abs_tol >= 0.0) || !std::isfinite(abs_tol)) {
    throw std::invalid_argument("quadrature.abs_tol: must be finite and non-negative");
  }
  if (max_evals < 1000) {
    throw std::invalid_argument("quadrature.max_evals: must be at least 1000");
  }
}

IntegralResult combine(const IntegralResult& a, const IntegralResult& b) {
  return {a.value + b.value, a.error_estimate + b.error_estimate, a.evals + b.evals,
          a.converged && b.converged};
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Index 7 is the centre node; odd indices are shared with the Gauss rule.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule1D {
  std::array<double, 15> nodes{};
  std::array<double, 15> kronrod{};
  std::array<double, 15> gauss{};  // zero on Kronrod-only nodes
};

constexpr Rule1D make_rule() {
  Rule1D r{};
  for (std::size_t i = 0; i < 7; ++i) {
    r.nodes[i] = -kKronrodNodes[i];
    r.nodes[14 - i] = kKronrodNodes[i];
    r.kronrod[i] = r.kronrod[14 - i] = kKronrodWeights[i];
    if (i % 2 == 1) r.gauss[i] = r.gauss[14 - i] = kGaussWeights[i / 2];
  }
  r.nodes[7] = 0.0;
  r.kronrod[7] = kKronrodWeights[7];
  r.gauss[7] = kGaussWeights[3];
  return r;
}

constexpr Rule1D kRule = make_rule();
constexpr std::int64_t kEvalsPerCell = 15 * 15;

struct Cell {
  Rect rect;
  double value = 0.0;
  double error = 0.0;
  bool split_x = true;
};

Cell evaluate_cell(const Integrand2D& f, const Rect& r) {
  const double cx = 0.5 * (r.x0 + r.x1), hx = 0.5 * (r.x1 - r.x0);
  const double cy = 0.5 * (r.y0 + r.y1), hy = 0.5 * (r.y1 - r.y0);
  double kk = 0.0, gk = 0.0, kg = 0.0;
  for (std::size_t i = 0; i < 15; ++i) {
    const double x = cx + hx * kRule.nodes[i];
    double row_k = 0.0, row_g = 0.0;
    for (std::size_t j = 0; j < 15; ++j) {
      const double v = f(x, cy + hy * kRule.nodes[j]);
      row_k += kRule.kronrod[j] * v;
      row_g += kRule.gauss[j] * v;
    }
    kk += kRule.kronrod[i] * row_k;
    gk += kRule.gauss[i] * row_k;
    kg += kRule.kronrod[i] * row_g;
  }
  const double jac = hx * hy;
  const double err_x = std::abs(kk - gk) * jac;
  const double err_y = std::abs(kk - kg) * jac;
  return {r, kk * jac, err_x + err_y, err_x >= err_y};
}

// Max-heap on error; equal errors pop the lexicographically smallest cell.
struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.error != b.error) return a.error < b.error;
    return std::tie(a.rect.x0, a.rect.y0, a.rect.x1, a.rect.y1) >
           std::tie(b.rect.x0, b.rect.y0, b.rect.x1, b.rect.y1);
  }
};

bool within_tolerance(double value, double error, const QuadratureSpec& spec) {
  return error <= std::max(spec.rel_tol * std::abs(value), spec.abs_tol);
}

IntegralResult integrate_adaptive(const Integrand2D& f, const Rect& domain,
                                  const QuadratureSpec& spec) {
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  Cell first = evaluate_cell(f, domain);
  std::int64_t evals = kEvalsPerCell;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);

  auto resum = [&] {
    // Re-accumulate from the heap storage to shed running-sum drift.
    std::vector<Cell> cells;
    cells.reserve(heap.size());
    while (!heap.empty()) {
      cells.push_back(heap.top());
      heap.pop();
    }
    total = 0.0;
    total_err = 0.0;
    for (const Cell& c : cells) {
      total += c.value;
      total_err += c.error;
    }
    for (Cell& c : cells) heap.push(std::move(c));
  };

  std::int64_t iterations = 0;
  while (!within_tolerance(total, total_err, spec)) {
    if (evals + 2 * kEvalsPerCell > spec.max_evals) break;
    Cell worst = heap.top();
    heap.pop();
    Rect a = worst.rect, b = worst.rect;
    if (worst.split_x) {
      const double mid = 0.5 * (worst.rect.x0 + worst.rect.x1);
      a.x1 = mid;
      b.x0 = mid;
    } else {
      const double mid = 0.5 * (worst.rect.y0 + worst.rect.y1);
      a.y1 = mid;
      b.y0 = mid;
    }
    Cell ca = evaluate_cell(f, a);
    Cell cb = evaluate_cell(f, b);
    evals += 2 * kEvalsPerCell;
    total += ca.value + cb.value - worst.value;
    total_err += ca.error + cb.error - worst.error;
    heap.push(ca);
    heap.push(cb);
    if (++iterations % 1024 == 0) resum();
  }
  resum();
  return {total, total_err, evals, within_tolerance(total, total_err, spec)};
}

// 10-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kLegendreNodes = {0.1488743389816312108848260,
                                                  0.4333953941292471907992659,
                                                  0.6794095682990244062343274,
                                                  0.8650633666889845107320967,
                                                  0.9739065285171717200779640};
constexpr std::array<double, 5> kLegendreWeights = {0.2955242247147528701738930,
                                                    0.2692667193099963550912269,
                                                    0.2190863625159820439955349,
                                                    0.1494513491505805931457763,
                                                    0.0666713443086881375935688};

double tensor_gauss_level(const Integrand2D& f, const Rect& domain, int cells_per_axis) {
  const double dx = (domain.x1 - domain.x0) / cells_per_axis;
  const double dy = (domain.y1 - domain.y0) / cells_per_axis;
  std::array<double, 10> nodes{}, weights{};
  for (std::size_t i = 0; i < 5; ++i) {
    nodes[i] = -kLegendreNodes[4 - i];
    weights[i] = kLegendreWeights[4 - i];
    nodes[5 + i] = kLegendreNodes[i];
    weights[5 + i] = kLegendreWeights[i];
  }
  double sum = 0.0;
  for (int cx = 0; cx < cells_per_axis; ++cx) {
    const double mx = domain.x0 + (cx + 0.5) * dx;
    for (int cy = 0; cy < cells_per_axis; ++cy) {
      const double my = domain.y0 + (cy + 0.5) * dy;
      double cell = 0.0;
      for (std::size_t i = 0; i < 10; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 10; ++j) {
          row += weights[j] * f(mx + 0.5 * dx * nodes[i], my + 0.5 * dy * nodes[j]);
        }
        cell += weights[i] * row;
      }
      sum += cell;
    }
  }
  return sum * 0.25 * dx * dy;
}

IntegralResult integrate_tensor(const Integrand2D& f, const Rect& domain,
                                const QuadratureSpec& spec) {
  std::int64_t evals = 100;
  double coarse = tensor_gauss_level(f, domain, 1);
  double err = std::abs(coarse);
  for (int n = 2;; n *= 2) {
    const std::int64_t cost = 100LL * n * n;
    if (evals + cost > spec.max_evals) return {coarse, err, evals, false};
    const double fine = tensor_gauss_level(f, domain, n);
    evals += cost;
    err = std::abs(fine - coarse);
    coarse = fine;
    if (within_tolerance(fine, err, spec)) return {fine, err, evals, true};
  }
}

}  // namespace

IntegralResult integrate_2d(const Integrand2D& f, const Rect& domain,
                            const QuadratureSpec& spec) {
  spec.validate();
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
    throw std::invalid_argument("integrate_2d: empty or inverted domain");
  }
  switch (spec.method) {
    case QuadratureMethod::AdaptiveSubdivision:
      return integrate_adaptive(f, domain, spec);
    case QuadratureMethod::TensorGauss:
      return integrate_tensor(f, domain, spec);
  }
  throw std::invalid_argument("integrate_2d: unknown method");
}

}  // namespace qionize
