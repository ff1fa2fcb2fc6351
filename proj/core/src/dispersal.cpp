#include "compete/dispersal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete {

Grid::Grid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
  if (n < 3) {
    throw ConfigError(fmt::format("grid needs n >= 3 points, got {}", n));
  }
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw ConfigError(
        fmt::format("grid needs x_min < x_max, got [{}, {}]", x_min, x_max));
  }
  h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

std::size_t Grid::index_of(double x) const {
  const double s = std::round((x - x_min_) / h_);
  if (s <= 0.0) return 0;
  if (s >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(s);
}

// ---------------------------------------------------------------------------

const char* kernel_shape_name(KernelShape s) {
  switch (s) {
    case KernelShape::uniform:
      return "uniform";
    case KernelShape::triangle:
      return "triangle";
    case KernelShape::raised_cosine:
      return "raised-cosine";
  }
  return "?";
}

std::optional<KernelShape> kernel_shape_from_name(const std::string& name) {
  for (auto s : {KernelShape::uniform, KernelShape::triangle,
                 KernelShape::raised_cosine}) {
    if (name == kernel_shape_name(s)) return s;
  }
  return std::nullopt;
}

Kernel::Kernel(KernelShape shape, double radius, double h)
    : shape_(shape), radius_(radius), h_(h) {
  if (!(radius > 0.0) || !(h > 0.0)) {
    throw ConfigError("kernel needs positive radius and spacing");
  }
  half_width_ = static_cast<std::size_t>(std::floor(radius / h + 1e-9));
  if (half_width_ < 1) {
    throw ConfigError(fmt::format(
        "kernel radius {} is below the grid spacing {}", radius, h));
  }
  const std::size_t m = half_width_;
  density_.resize(2 * m + 1);
  weights_.resize(2 * m + 1);
  double mass = 0.0;
  for (std::size_t i = 0; i <= 2 * m; ++i) {
    const double z =
        (static_cast<double>(i) - static_cast<double>(m)) * h;
    density_[i] = continuous_density(z);
    const double w = (i == 0 || i == 2 * m) ? 0.5 : 1.0;
    mass += w * h * density_[i];
  }
  for (std::size_t i = 0; i <= 2 * m; ++i) {
    density_[i] /= mass;
    const double w = (i == 0 || i == 2 * m) ? 0.5 : 1.0;
    weights_[i] = w * h * density_[i];
  }
  // Enforce exact mirror symmetry of the weights.
  for (std::size_t i = 0; i < m; ++i) {
    const double avg = 0.5 * (weights_[i] + weights_[2 * m - i]);
    weights_[i] = weights_[2 * m - i] = avg;
  }
}

double Kernel::continuous_density(double z) const {
  const double a = std::abs(z);
  // Closed support: the uniform density keeps its value at |z| = R.
  if (a > radius_ * (1.0 + 1e-12)) return 0.0;
  switch (shape_) {
    case KernelShape::uniform:
      return 0.5 / radius_;
    case KernelShape::triangle:
      return std::max(0.0, 1.0 - a / radius_) / radius_;
    case KernelShape::raised_cosine:
      return a >= radius_
                 ? 0.0
                 : (1.0 + std::cos(std::numbers::pi * a / radius_)) /
                       (2.0 * radius_);
  }
  return 0.0;
}

double Kernel::mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

std::size_t Dispersal::reach() const {
  return kind == DispersalKind::random ? 1 : kernel->half_width();
}

double Dispersal::reach_length(double h) const {
  return kind == DispersalKind::random ? h : kernel->radius();
}

// ---------------------------------------------------------------------------

void apply_random(std::span<const double> u, const Grid& grid,
                  std::span<double> out) {
  const std::size_t n = grid.size();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  out[0] = (2.0 * u[1] - 2.0 * u[0]) * inv_h2;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[j] = (u[j - 1] - 2.0 * u[j] + u[j + 1]) * inv_h2;
  }
  out[n - 1] = (2.0 * u[n - 2] - 2.0 * u[n - 1]) * inv_h2;
}

Field apply_random(std::span<const double> u, const Grid& grid) {
  Field out(grid.size());
  apply_random(u, grid, out);
  return out;
}

void check_kernel_fits(const Grid& grid, const Kernel& k) {
  if (!(k.radius() < 0.5 * grid.length())) {
    throw ConfigError(fmt::format(
        "kernel support {} exceeds half the domain length {}", k.radius(),
        0.5 * grid.length()));
  }
  if (std::abs(k.h() - grid.h()) > 1e-12 * grid.h()) {
    throw ConfigError("kernel was sampled on a different grid spacing");
  }
}

namespace {

void convolve(std::span<const double> u, std::span<const double> w,
              std::size_t m, std::span<double> out) {
  const std::size_t n = u.size();
  const auto mm = static_cast<std::ptrdiff_t>(m);
  const auto nn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t j = 0; j < nn; ++j) {
    double acc = 0.0;
    if (j >= mm && j + mm < nn) {
      const double* up = u.data() + (j - mm);
      for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * up[i];
    } else {
      for (std::ptrdiff_t k = -mm; k <= mm; ++k) {
        const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(j + k, 0, nn - 1);
        acc += w[static_cast<std::size_t>(k + mm)] *
               u[static_cast<std::size_t>(idx)];
      }
    }
    out[static_cast<std::size_t>(j)] = acc - u[static_cast<std::size_t>(j)];
  }
}

}  // namespace

void apply_nonlocal(std::span<const double> u, const Grid& grid,
                    const Kernel& k, std::span<double> out) {
  check_kernel_fits(grid, k);
  convolve(u, k.weights(), k.half_width(), out);
}

Field apply_nonlocal(std::span<const double> u, const Grid& grid,
                     const Kernel& k) {
  Field out(grid.size());
  apply_nonlocal(u, grid, k, out);
  return out;
}

Field apply_tilted_random(std::span<const double> u, const Grid& grid,
                          double mu) {
  Field out = apply_random(u, grid);
  if (mu != 0.0) {
    const double m2 = mu * mu;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += m2 * u[j];
  }
  return out;
}

void apply_tilted_nonlocal(std::span<const double> u, const Grid& grid,
                           const Kernel& k, double mu, std::span<double> out) {
  if (mu == 0.0) {
    apply_nonlocal(u, grid, k, out);
    return;
  }
  check_kernel_fits(grid, k);
  const std::size_t m = k.half_width();
  std::vector<double> w(k.weights().begin(), k.weights().end());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double z = (static_cast<double>(i) - static_cast<double>(m)) * k.h();
    w[i] *= std::exp(-mu * z);
  }
  convolve(u, w, m, out);
}

Field apply_tilted_nonlocal(std::span<const double> u, const Grid& grid,
                            const Kernel& k, double mu) {
  Field out(grid.size());
  apply_tilted_nonlocal(u, grid, k, mu, out);
  return out;
}

double kernel_moment(const Kernel& k, double mu) {
  const auto w = k.weights();
  const std::size_t m = k.half_width();
  double acc = 0.0;
  // Pair symmetric offsets so that m(mu) == m(-mu) holds bitwise.
  for (std::size_t i = 0; i < m; ++i) {
    const double z = static_cast<double>(m - i) * k.h();
    acc += w[i] * (std::exp(mu * z) + std::exp(-mu * z));
  }
  return acc + w[m];
}

void apply_dispersal(const Dispersal& d, std::span<const double> u,
                     const Grid& grid, std::span<double> out) {
  if (d.is_random()) {
    apply_random(u, grid, out);
  } else {
    apply_nonlocal(u, grid, *d.kernel, out);
  }
}

double tilt_rate(const Dispersal& d, double mu) {
  if (d.is_random()) return mu * mu;
  return kernel_moment(*d.kernel, mu) - 1.0;
}

}  // namespace compete
