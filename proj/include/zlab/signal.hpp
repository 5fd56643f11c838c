#pragma once

#include <vector>

#include "zlab/common.hpp"

namespace zlab {

/// Unnormalized in-place DFTs backed by FFTW. forward uses e^{-2πijq/N},
/// backward uses e^{+2πijq/N}; backward(forward(x)) = N·x.
void fft_forward(std::vector<cplx>& data);
void fft_backward(std::vector<cplx>& data);

/// Signed integer frequency index of DFT slot q.
inline long long signed_index(std::size_t q, std::size_t n) {
  return q < n / 2 ? static_cast<long long>(q) : static_cast<long long>(q) - static_cast<long long>(n);
}

/// Complex samples f(x_j), x_j = a + j·h, on a periodic window [a,b).
class SampledSignal {
 public:
  SampledSignal() = default;
  SampledSignal(std::vector<cplx> samples, double a, double b);
  static SampledSignal zeros(std::size_t n, double a, double b);
  static SampledSignal from_function(std::size_t n, double a, double b,
                                     const std::function<cplx(double)>& fn);

  std::size_t size() const { return samples_.size(); }
  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }
  double h() const { return (b_ - a_) / static_cast<double>(samples_.size()); }
  double x(std::size_t j) const { return a_ + static_cast<double>(j) * h(); }
  /// Frequency of DFT slot q, in cycles per unit length.
  double xi(std::size_t q) const { return static_cast<double>(signed_index(q, size())) / length(); }

  const std::vector<cplx>& samples() const { return samples_; }
  std::vector<cplx>& samples() { return samples_; }
  cplx operator[](std::size_t j) const { return samples_[j]; }
  cplx& operator[](std::size_t j) { return samples_[j]; }

  bool same_grid(const SampledSignal& other) const;

  /// Continuous Fourier transform sampled at xi(q): h·Σ f_j e^{-2πi x_j ξ}.
  std::vector<cplx> spectrum() const;
  static SampledSignal from_spectrum(const std::vector<cplx>& fhat, double a, double b);

  double norm2() const;
  std::vector<double> abs() const;

 private:
  std::vector<cplx> samples_;
  double a_ = 0.0;
  double b_ = 1.0;
};

/// ∫ f·conj(g) by the periodic trapezoid rule.
cplx inner(const SampledSignal& f, const SampledSignal& g);

/// Minimum-image difference x - y on a periodic window of length period.
double periodic_difference(double x, double y, double period);

}  // namespace zlab
