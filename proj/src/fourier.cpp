#include "qwkt/fourier.hpp"

#include <fftw3.h>

#include <cstdint>
#include <mutex>
#include <numbers>

#include "qwkt/errors.hpp"

namespace qwkt::fourier {

namespace {

// FFTW's planner is not reentrant; execution of a plan on its own arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// e^{-iπ·((n-1)·k mod 2n)/n} = e^{-2πi·c·k/n}
Complex center_twiddle(std::uint64_t n, std::uint64_t k, double sign) {
  const std::uint64_t m = ((n - 1) * k) % (2 * n);
  const double angle = sign * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
  return std::polar(1.0, angle);
}

// e^{iπ·((n-1)² mod 4n)/(2n)} = e^{2πi·c²/n}
Complex constant_twiddle(std::uint64_t n, double sign) {
  const std::uint64_t m = ((n - 1) * (n - 1)) % (4 * n);
  const double angle =
      sign * std::numbers::pi * static_cast<double>(m) / (2.0 * static_cast<double>(n));
  return std::polar(1.0, angle);
}

}  // namespace

std::vector<Complex> dft(std::span<const Complex> x, int sign) {
  const auto n = x.size();
  std::vector<Complex> in(x.begin(), x.end());
  std::vector<Complex> out(n);
  if (n == 0) return out;
  auto* pin = reinterpret_cast<fftw_complex*>(in.data());
  auto* pout = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), pin, pout, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<Complex> centered_forward(std::span<const Complex> r, double dt) {
  const std::uint64_t n = r.size();
  std::vector<Complex> a(n);
  for (std::uint64_t k = 0; k < n; ++k) a[k] = r[k] * center_twiddle(n, k, -1.0);
  auto f = dft(a, +1);
  const Complex scale = constant_twiddle(n, +1.0) * (dt / (2.0 * std::numbers::pi));
  for (std::uint64_t j = 0; j < n; ++j) f[j] *= center_twiddle(n, j, -1.0) * scale;
  return f;
}

std::vector<Complex> centered_inverse(std::span<const Complex> f, double domega) {
  const std::uint64_t n = f.size();
  std::vector<Complex> a(n);
  for (std::uint64_t j = 0; j < n; ++j) a[j] = f[j] * center_twiddle(n, j, +1.0);
  auto r = dft(a, -1);
  const Complex scale = constant_twiddle(n, -1.0) * domega;
  for (std::uint64_t k = 0; k < n; ++k) r[k] *= center_twiddle(n, k, +1.0) * scale;
  return r;
}

}  // namespace qwkt::fourier
