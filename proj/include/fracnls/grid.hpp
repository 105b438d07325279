#pragma once

// Periodic uniform grids, complex grid functions and Fourier multipliers.
//
// The box is [-L, L)^n sampled at x_j = -L + j h, h = 2L/N, stored row-major.
// Spectral coefficients are kept in FFT order along every axis; index k_idx
// maps to the integer wavenumber k = k_idx for k_idx < N/2 and k_idx - N
// otherwise, so the Nyquist mode is k = -N/2 and xi = pi k / L.
//
// The transform is scaled so that Parseval is exact:
//   sum_j |f_j|^2 h^n == sum_k |fhat_k|^2.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace fracnls {

using cplx = std::complex<double>;
using Point = std::array<double, 2>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

class GridSpec {
 public:
  GridSpec(int dimension, int points, double half_width)
      : dimension_(dimension), points_(points), half_width_(half_width) {
    if (dimension != 1 && dimension != 2)
      throw std::invalid_argument("grid: dimension must be 1 or 2");
    if (points < 8 || points % 2 != 0)
      throw std::invalid_argument("grid: N even and >= 8 required, got N=" + std::to_string(points));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw std::invalid_argument("grid: half-width L must be positive and finite");
  }

  int dimension() const { return dimension_; }
  int points() const { return points_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / points_; }
  double cell_volume() const { return std::pow(spacing(), dimension_); }
  double box_volume() const { return std::pow(2.0 * half_width_, dimension_); }

  std::size_t size() const {
    return dimension_ == 1 ? std::size_t(points_) : std::size_t(points_) * std::size_t(points_);
  }

  double coordinate(int j) const { return -half_width_ + j * spacing(); }

  /// Signed integer wavenumber of FFT-order index k_idx.
  int wavenumber_index(int k_idx) const { return k_idx < points_ / 2 ? k_idx : k_idx - points_; }
  double wavenumber(int k_idx) const { return pi * wavenumber_index(k_idx) / half_width_; }

  /// Axis indices of a flat row-major index.
  std::array<int, 2> unflatten(std::size_t flat) const {
    if (dimension_ == 1) return {int(flat), 0};
    return {int(flat / std::size_t(points_)), int(flat % std::size_t(points_))};
  }

  std::size_t flatten(int i0, int i1 = 0) const {
    return dimension_ == 1 ? std::size_t(i0) : std::size_t(i0) * std::size_t(points_) + std::size_t(i1);
  }

  Point position(std::size_t flat) const {
    auto idx = unflatten(flat);
    return {coordinate(idx[0]), dimension_ == 2 ? coordinate(idx[1]) : 0.0};
  }

  Point frequency(std::size_t flat) const {
    auto idx = unflatten(flat);
    return {wavenumber(idx[0]), dimension_ == 2 ? wavenumber(idx[1]) : 0.0};
  }

  /// |xi|^2 for every spectral index, FFT order.
  std::vector<double> squared_frequencies() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto xi = frequency(i);
      out[i] = xi[0] * xi[0] + xi[1] * xi[1];
    }
    return out;
  }

  /// |x|^2 for every grid point.
  std::vector<double> squared_radii() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto x = position(i);
      out[i] = x[0] * x[0] + x[1] * x[1];
    }
    return out;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dimension_;
  int points_;
  double half_width_;
};

/// Complex grid function on a GridSpec.
class Field {
 public:
  explicit Field(GridSpec spec) : spec_(spec), values_(spec.size()) {}

  Field(GridSpec spec, std::vector<cplx> values) : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.size())
      throw std::invalid_argument("field: value count " + std::to_string(values_.size()) +
                                  " does not match grid size " + std::to_string(spec_.size()));
    if (!is_finite()) throw std::invalid_argument("field: non-finite value");
  }

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  bool is_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  double max_abs() const {
    double m = 0.0;
    for (auto z : values_) m = std::max(m, std::abs(z));
    return m;
  }

  Field& operator+=(const Field& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }
  Field& operator-=(const Field& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
  }
  Field& operator*=(cplx c) {
    for (auto& z : values_) z *= c;
    return *this;
  }

  void require_same_grid(const Field& other) const {
    if (!(spec_ == other.spec_)) throw std::invalid_argument("field: grid specifications differ");
  }

 private:
  GridSpec spec_;
  std::vector<cplx> values_;
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(cplx c, Field a) { return a *= c; }
inline Field operator*(Field a, cplx c) { return a *= c; }

/// Samples fn(Point) -> cplx (or real) at every grid point.
template <class Fn>
Field sample(const GridSpec& spec, Fn&& fn) {
  std::vector<cplx> v(spec.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(fn(spec.position(i)));
  return Field(spec, std::move(v));
}

/// Spectral coefficients in FFT order, unitary scaling.
struct SpectralField {
  GridSpec spec;
  std::vector<cplx> coeffs;
};

namespace detail {

// FFTW plans are created once per (dimension, N, direction) under a lock and
// reused through the new-array execute interface, which is thread-safe.
class PlanCache {
 public:
  static fftw_plan get(int dimension, int points, int sign) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mutex_);
    auto key = std::make_tuple(dimension, points, sign);
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;
    std::size_t total = dimension == 1 ? std::size_t(points) : std::size_t(points) * points;
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    int dims[2] = {points, points};
    fftw_plan plan = fftw_plan_dft(dimension, dims, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    cache.plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

/// Unnormalized DFT, sign -1 forward / +1 backward, out of place.
inline std::vector<cplx> raw_dft(const GridSpec& spec, std::span<const cplx> in, int sign) {
  if (in.size() != spec.size()) throw std::invalid_argument("fft: size mismatch");
  std::vector<cplx> out(in.size());
  fftw_plan plan = PlanCache::get(spec.dimension(), spec.points(), sign);
  // FFTW does not write through the input pointer of an out-of-place plan.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

inline double unitary_scale(const GridSpec& spec) {
  return std::sqrt(spec.cell_volume() / static_cast<double>(spec.size()));
}

}  // namespace detail

inline SpectralField forward_transform(const Field& f) {
  auto coeffs = detail::raw_dft(f.spec(), f.values(), FFTW_FORWARD);
  const double c = detail::unitary_scale(f.spec());
  for (auto& z : coeffs) z *= c;
  return {f.spec(), std::move(coeffs)};
}

inline Field inverse_transform(const SpectralField& g) {
  if (g.coeffs.size() != g.spec.size()) throw std::invalid_argument("fft: size mismatch");
  auto values = detail::raw_dft(g.spec, g.coeffs, FFTW_BACKWARD);
  const double c = 1.0 / (detail::unitary_scale(g.spec) * static_cast<double>(g.spec.size()));
  for (auto& z : values) z *= c;
  return Field(g.spec, std::move(values));
}

/// Applies m(xi) in Fourier space. m receives the frequency vector.
template <class Multiplier>
Field apply_multiplier(const Field& f, Multiplier&& m) {
  auto g = forward_transform(f);
  for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
    cplx mv = cplx(m(g.spec.frequency(i)));
    if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag()))
      throw std::domain_error("multiplier: non-finite value on the frequency lattice");
    g.coeffs[i] *= mv;
  }
  return inverse_transform(g);
}

/// Applies a multiplier that depends on |xi|^2 only.
template <class RadialMultiplier>
Field apply_radial_multiplier(const Field& f, RadialMultiplier&& m) {
  auto g = forward_transform(f);
  const auto xi2 = g.spec.squared_frequencies();
  for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
    cplx mv = cplx(m(xi2[i]));
    if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag()))
      throw std::domain_error("multiplier: non-finite value on the frequency lattice");
    g.coeffs[i] *= mv;
  }
  return inverse_transform(g);
}

/// Multiplier |xi|^{2 order}. order = s gives (-Delta)^s, order = s/2 gives (-Delta)^{s/2}.
inline Field fractional_laplacian(const Field& f, double order) {
  if (!(order > 0.0)) throw std::invalid_argument("fractional_laplacian: order must be positive");
  return apply_radial_multiplier(f, [order](double xi2) { return std::pow(xi2, order); });
}

/// Exact free flow e^{i t (-Delta)^s}.
inline Field linear_flow(const Field& f, double s, double t) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("linear_flow: need 0 < s <= 1");
  return apply_radial_multiplier(f, [s, t](double xi2) { return std::polar(1.0, t * std::pow(xi2, s)); });
}

/// sum (1+|xi|^2)^s fhat conj(ghat); linear in the first argument.
inline cplx sobolev_inner(const SpectralField& f, const SpectralField& g, double s) {
  if (!(f.spec == g.spec)) throw std::invalid_argument("sobolev_inner: grid specifications differ");
  const auto xi2 = f.spec.squared_frequencies();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < xi2.size(); ++i) {
    double w = s == 0.0 ? 1.0 : std::pow(1.0 + xi2[i], s);
    acc += w * f.coeffs[i] * std::conj(g.coeffs[i]);
  }
  return acc;
}

inline cplx sobolev_inner(const Field& f, const Field& g, double s) {
  f.require_same_grid(g);
  return sobolev_inner(forward_transform(f), forward_transform(g), s);
}

inline double sobolev_norm(const Field& f, double s) {
  return std::sqrt(std::max(0.0, sobolev_inner(f, f, s).real()));
}

/// sum f conj(g) h^n.
inline cplx l2_inner(const Field& f, const Field& g) {
  f.require_same_grid(g);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
  return acc * f.spec().cell_volume();
}

inline double l2_norm(const Field& f) { return std::sqrt(l2_inner(f, f).real()); }

/// Largest |f| on the outermost grid layer divided by max |f| (0 for the zero field).
inline double boundary_amplitude_ratio(const Field& f) {
  const auto& spec = f.spec();
  const int last = spec.points() - 1;
  double edge = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = spec.unflatten(i);
    bool on_edge = idx[0] == 0 || idx[0] == last ||
                   (spec.dimension() == 2 && (idx[1] == 0 || idx[1] == last));
    if (on_edge) edge = std::max(edge, std::abs(f[i]));
  }
  double peak = f.max_abs();
  return peak > 0.0 ? edge / peak : 0.0;
}

/// Fraction of spectral mass in modes with some |k_axis| > N/4.
inline double spectral_tail_fraction(const Field& f) {
  auto g = forward_transform(f);
  const auto& spec = g.spec;
  const int quarter = spec.points() / 4;
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
    auto idx = spec.unflatten(i);
    double p = std::norm(g.coeffs[i]);
    total += p;
    bool high = std::abs(spec.wavenumber_index(idx[0])) > quarter ||
                (spec.dimension() == 2 && std::abs(spec.wavenumber_index(idx[1])) > quarter);
    if (high) tail += p;
  }
  return total > 0.0 ? tail / total : 0.0;
}

/// Periodic lattice translation: result(x) = f(x - shift h).
inline Field translate(const Field& f, std::array<int, 2> shift) {
  const auto& spec = f.spec();
  const int n = spec.points();
  Field out(spec);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = spec.unflatten(i);
    int a = ((idx[0] - shift[0]) % n + n) % n;
    int b = spec.dimension() == 2 ? ((idx[1] - shift[1]) % n + n) % n : 0;
    out[i] = f[spec.flatten(a, b)];
  }
  return out;
}

}  // namespace fracnls
