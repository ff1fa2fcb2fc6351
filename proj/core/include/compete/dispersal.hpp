#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace compete {

using Field = std::vector<double>;

/// Uniform 1-D grid x_j = x_min + j*h, j = 0..n-1.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double h() const { return h_; }
  double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * h_; }
  double length() const { return x_max_ - x_min_; }
  std::vector<double> points() const;
  /// Index of the grid point closest to x (clamped).
  std::size_t index_of(double x) const;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double h_;
};

enum class KernelShape { uniform, triangle, raised_cosine };

const char* kernel_shape_name(KernelShape s);
std::optional<KernelShape> kernel_shape_from_name(const std::string& name);

/// Symmetric dispersal kernel sampled at z_k = k*h, k = -m..m, m*h <= R.
///
/// Samples carry trapezoid weights and are renormalized so that the discrete
/// mass sum_k w_k * kappa_k * h is 1 up to rounding.
class Kernel {
 public:
  Kernel(KernelShape shape, double radius, double h);

  KernelShape shape() const { return shape_; }
  double radius() const { return radius_; }
  double h() const { return h_; }
  /// Number of samples on one side (offsets -half_width..half_width).
  std::size_t half_width() const { return half_width_; }
  /// Density samples kappa(z_k) after renormalization, index k + half_width.
  std::span<const double> density() const { return density_; }
  /// Quadrature weights w_k * h * kappa_k (sum to 1).
  std::span<const double> weights() const { return weights_; }
  double mass() const;
  /// Exact continuous density (before sampling/renormalization).
  double continuous_density(double z) const;

 private:
  KernelShape shape_;
  double radius_;
  double h_;
  std::size_t half_width_;
  std::vector<double> density_;
  std::vector<double> weights_;
};

enum class DispersalKind { random, nonlocal };

/// Which dispersal operator acts on the fields.
struct Dispersal {
  DispersalKind kind = DispersalKind::random;
  std::optional<Kernel> kernel;

  static Dispersal random() { return {}; }
  static Dispersal nonlocal(Kernel k) {
    return Dispersal{DispersalKind::nonlocal, std::move(k)};
  }
  bool is_random() const { return kind == DispersalKind::random; }
  /// Stencil reach in grid points (1 for the Laplacian, kernel half-width
  /// otherwise).
  std::size_t reach() const;
  /// Support radius in length units (h for the Laplacian).
  double reach_length(double h) const;
};

/// Second-order central difference with reflecting ghost points.
void apply_random(std::span<const double> u, const Grid& grid,
                  std::span<double> out);
Field apply_random(std::span<const double> u, const Grid& grid);

/// Trapezoid convolution minus identity; values beyond the window are the
/// boundary value (constant extension).
void apply_nonlocal(std::span<const double> u, const Grid& grid,
                    const Kernel& k, std::span<double> out);
Field apply_nonlocal(std::span<const double> u, const Grid& grid,
                     const Kernel& k);

/// u_xx + mu^2 u.
Field apply_tilted_random(std::span<const double> u, const Grid& grid,
                          double mu);
/// Convolution against exp(-mu z) kappa(z), minus identity.
Field apply_tilted_nonlocal(std::span<const double> u, const Grid& grid,
                            const Kernel& k, double mu);
void apply_tilted_nonlocal(std::span<const double> u, const Grid& grid,
                           const Kernel& k, double mu, std::span<double> out);

/// Trapezoid integral of kappa(z) exp(-mu z).
double kernel_moment(const Kernel& k, double mu);

/// Operator applied by kind (untilted).
void apply_dispersal(const Dispersal& d, std::span<const double> u,
                     const Grid& grid, std::span<double> out);

/// Growth rate of the tilted operator on constant fields: mu^2 (random) or
/// kernel_moment(mu) - 1 (nonlocal).
double tilt_rate(const Dispersal& d, double mu);

/// Throws ConfigError when the kernel support exceeds half the domain.
void check_kernel_fits(const Grid& grid, const Kernel& k);

}  // namespace compete
