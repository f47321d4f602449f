#include "qionize/kernel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qionize {

TabulatedKernel::TabulatedKernel(std::size_t n_i, std::size_t n_s, std::vector<double> values,
                                 std::string label)
    : n_i_(n_i), n_s_(n_s), values_(std::move(values)), label_(std::move(label)) {
  if (n_i_ < 2 || n_s_ < 2) {
    throw std::invalid_argument("kernel: grid needs at least 2 nodes per axis");
  }
  if (values_.size() != n_i_ * n_s_) {
    throw std::invalid_argument(fmt::format("kernel: expected {} values, got {}",
                                            n_i_ * n_s_, values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("kernel: non-finite value");
  }
}

double TabulatedKernel::operator()(double kix, double ksx, double k0) const {
  auto locate = [k0](double k, std::size_t n, std::size_t& idx, double& frac) {
    const double pos = std::clamp((k / k0 + 1.0) * 0.5, 0.0, 1.0) * static_cast<double>(n - 1);
    idx = std::min(static_cast<std::size_t>(pos), n - 2);
    frac = pos - static_cast<double>(idx);
  };
  std::size_t i = 0, s = 0;
  double fi = 0.0, fs = 0.0;
  locate(kix, n_i_, i, fi);
  locate(ksx, n_s_, s, fs);
  const auto at = [this](std::size_t r, std::size_t c) { return values_[r * n_s_ + c]; };
  return (1.0 - fi) * ((1.0 - fs) * at(i, s) + fs * at(i, s + 1)) +
         fi * ((1.0 - fs) * at(i + 1, s) + fs * at(i + 1, s + 1));
}

TabulatedKernel parse_kernel(std::string_view text, std::string label) {
  std::istringstream in{std::string(text)};
  std::string magic, version;
  long long n_i = 0, n_s = 0;
  if (!(in >> magic >> version >> n_i >> n_s) || magic != "kernel" || version != "v1") {
    throw std::invalid_argument("kernel: header must be 'kernel v1 n_i n_s'");
  }
  if (n_i < 2 || n_s < 2) throw std::invalid_argument("kernel: n_i and n_s must be >= 2");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_i * n_s));
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw std::invalid_argument("kernel: malformed value");
  return TabulatedKernel(static_cast<std::size_t>(n_i), static_cast<std::size_t>(n_s),
                         std::move(values), std::move(label));
}

TabulatedKernel load_kernel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("kernel: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kernel(buf.str(), path.filename().string());
}

std::string serialize_kernel(const TabulatedKernel& kernel) {
  std::string out = fmt::format("kernel v1 {} {}\n", kernel.n_i(), kernel.n_s());
  for (std::size_t r = 0; r < kernel.n_i(); ++r) {
    for (std::size_t c = 0; c < kernel.n_s(); ++c) {
      out += fmt::format("{}{:.17g}", c == 0 ? "" : " ", kernel.values()[r * kernel.n_s() + c]);
    }
    out += '\n';
  }
  return out;
}

double synthetic_kernel_value(SyntheticParity parity, double kix, double ksx, double k0) {
  const double ti = std::asin(std::clamp(kix / k0, -1.0, 1.0));
  const double ts = std::asin(std::clamp(ksx / k0, -1.0, 1.0));
  return parity == SyntheticParity::Even ? std::cos(ti) * std::cos(ts) : std::sin(ti - ts);
}

TabulatedKernel make_synthetic_kernel(SyntheticParity parity, std::size_t n) {
  if (n < 2) throw std::invalid_argument("kernel: n must be >= 2");
  std::vector<double> values(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const double x = -1.0 + 2.0 * static_cast<double>(r) / static_cast<double>(n - 1);
    for (std::size_t c = 0; c < n; ++c) {
      const double y = -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(n - 1);
      values[r * n + c] = synthetic_kernel_value(parity, x, y, 1.0);
    }
  }
  return TabulatedKernel(n, n, std::move(values),
                         parity == SyntheticParity::Even ? "synthetic_even" : "synthetic_odd");
}

}  // namespace qionize
