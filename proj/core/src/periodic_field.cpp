#include "compete/periodic_field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete {

PeriodicField::PeriodicField(double period, Grid grid, std::vector<Field> samples,
                             double wrap_residual)
    : period_(period),
      grid_(std::move(grid)),
      samples_(std::make_shared<const std::vector<Field>>(std::move(samples))),
      wrap_residual_(wrap_residual) {
  if (samples_->empty()) {
    throw ConfigError("periodic field needs at least one time sample");
  }
  for (const auto& f : *samples_) {
    if (f.size() != grid_.size()) {
      throw ConfigError("periodic field sample does not match the grid");
    }
  }
}

double PeriodicField::value(double t, std::size_t j) const {
  const std::size_t N = samples_->size();
  const double dt = period_ / static_cast<double>(N);
  const double q = (t - std::floor(t / period_) * period_) / dt;
  const auto k = static_cast<std::size_t>(std::floor(q));
  const double s = q - static_cast<double>(k);
  const double a = at_step(k)[j];
  const double b = at_step(k + 1)[j];
  return a + s * (b - a);
}

double PeriodicField::sup() const {
  double m = -INFINITY;
  for (const auto& f : *samples_) m = std::max(m, *std::max_element(f.begin(), f.end()));
  return m;
}

double PeriodicField::inf() const {
  double m = INFINITY;
  for (const auto& f : *samples_) m = std::min(m, *std::min_element(f.begin(), f.end()));
  return m;
}

void PeriodicField::write_csv(std::ostream& os, std::size_t time_stride,
                              std::size_t space_stride) const {
  time_stride = std::max<std::size_t>(time_stride, 1);
  space_stride = std::max<std::size_t>(space_stride, 1);
  const std::size_t N = samples_->size();
  os << "t,x,value\n";
  for (std::size_t k = 0; k < N; k += time_stride) {
    const double t = period_ * static_cast<double>(k) / static_cast<double>(N);
    const auto& f = (*samples_)[k];
    for (std::size_t j = 0; j < f.size(); j += space_stride) {
      os << fmt::format("{:.10g},{:.10g},{:.12g}\n", t, grid_.x(j), f[j]);
    }
  }
}

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'P', 'F', '1'};

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little,
                "binary snapshots assume a little-endian host");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw ConfigError("truncated periodic field snapshot");
  return value;
}

}  // namespace

void PeriodicField::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError(fmt::format("cannot write {}", path.string()));
  os.write(kMagic.data(), kMagic.size());
  put<double>(os, period_);
  put<std::uint64_t>(os, samples_->size());
  put<double>(os, grid_.x_min());
  put<double>(os, grid_.x_max());
  put<std::uint64_t>(os, grid_.size());
  put<double>(os, wrap_residual_);
  for (const auto& f : *samples_) {
    os.write(reinterpret_cast<const char*>(f.data()),
             static_cast<std::streamsize>(f.size() * sizeof(double)));
  }
}

PeriodicField PeriodicField::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(fmt::format("cannot read {}", path.string()));
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (magic != kMagic) {
    throw ConfigError(fmt::format("{} is not a periodic field snapshot", path.string()));
  }
  const auto period = get<double>(is);
  const auto steps = get<std::uint64_t>(is);
  const auto x_min = get<double>(is);
  const auto x_max = get<double>(is);
  const auto n = get<std::uint64_t>(is);
  const auto wrap = get<double>(is);
  Grid grid(x_min, x_max, n);
  std::vector<Field> samples(steps, Field(n));
  for (auto& f : samples) {
    is.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw ConfigError("truncated periodic field snapshot");
  }
  return PeriodicField(period, std::move(grid), std::move(samples), wrap);
}

}  // namespace compete
