#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include "compete/dispersal.hpp"

namespace compete {

/// A T-periodic space-time field stored at every scheme step:
/// sample k is the field at t = k T / N, k = 0..N-1.
class PeriodicField {
 public:
  PeriodicField(double period, Grid grid, std::vector<Field> samples,
                double wrap_residual);

  double period() const { return period_; }
  const Grid& grid() const { return grid_; }
  std::size_t steps_per_period() const { return samples_->size(); }
  /// Sample at step index k (wrapped modulo N).
  const Field& at_step(std::size_t k) const {
    return (*samples_)[k % samples_->size()];
  }
  /// Piecewise-linear interpolation in time at grid point j.
  double value(double t, std::size_t j) const;
  double wrap_residual() const { return wrap_residual_; }

  double sup() const;
  double inf() const;

  /// "t,x,value" rows for every `time_stride`-th step and `space_stride`-th
  /// grid point.
  void write_csv(std::ostream& os, std::size_t time_stride = 1,
                 std::size_t space_stride = 1) const;
  /// Compact little-endian binary snapshot.
  void save(const std::filesystem::path& path) const;
  static PeriodicField load(const std::filesystem::path& path);

 private:
  double period_;
  Grid grid_;
  std::shared_ptr<const std::vector<Field>> samples_;
  double wrap_residual_;
};

}  // namespace compete
