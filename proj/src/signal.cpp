#include "zlab/signal.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace zlab {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans are created once per size and kept for the process lifetime; execution
// through fftw_execute_dft on caller buffers is thread-safe.
const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

void run(std::vector<cplx>& data, bool forward) {
  if (data.size() <= 1) return;
  const PlanPair& p = plans_for(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(forward ? p.forward : p.backward, buf, buf);
}

}  // namespace

void fft_forward(std::vector<cplx>& data) { run(data, true); }
void fft_backward(std::vector<cplx>& data) { run(data, false); }

SampledSignal::SampledSignal(std::vector<cplx> samples, double a, double b)
    : samples_(std::move(samples)), a_(a), b_(b) {
  if (!is_power_of_two(samples_.size()))
    throw Error(ErrorCode::InvalidArgument, "sample count must be a power of two");
  if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "window must satisfy a < b");
}

SampledSignal SampledSignal::zeros(std::size_t n, double a, double b) {
  return SampledSignal(std::vector<cplx>(n), a, b);
}

SampledSignal SampledSignal::from_function(std::size_t n, double a, double b,
                                           const std::function<cplx(double)>& fn) {
  SampledSignal s = zeros(n, a, b);
  for (std::size_t j = 0; j < n; ++j) s.samples_[j] = fn(s.x(j));
  return s;
}

bool SampledSignal::same_grid(const SampledSignal& other) const {
  return size() == other.size() && a_ == other.a_ && b_ == other.b_;
}

std::vector<cplx> SampledSignal::spectrum() const {
  std::vector<cplx> out = samples_;
  fft_forward(out);
  const double step = h();
  for (std::size_t q = 0; q < out.size(); ++q)
    out[q] *= step * std::polar(1.0, -2.0 * kPi * a_ * xi(q));
  return out;
}

SampledSignal SampledSignal::from_spectrum(const std::vector<cplx>& fhat, double a, double b) {
  SampledSignal s(fhat, a, b);
  const double len = b - a;
  for (std::size_t q = 0; q < fhat.size(); ++q)
    s.samples_[q] *= std::polar(1.0, 2.0 * kPi * a * s.xi(q)) / len;
  fft_backward(s.samples_);
  return s;
}

double SampledSignal::norm2() const {
  double acc = 0.0;
  for (const cplx& v : samples_) acc += std::norm(v);
  return std::sqrt(acc * h());
}

std::vector<double> SampledSignal::abs() const {
  std::vector<double> out(samples_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::abs(samples_[j]);
  return out;
}

cplx inner(const SampledSignal& f, const SampledSignal& g) {
  if (!f.same_grid(g)) throw Error(ErrorCode::GridMismatch, "inner product across grids");
  cplx acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * std::conj(g[j]);
  return acc * f.h();
}

double periodic_difference(double x, double y, double period) {
  double d = std::fmod(x - y, period);
  if (d >= 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

}  // namespace zlab
