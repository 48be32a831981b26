#include "leakwave/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>

#include "leakwave/errors.hpp"

namespace leakwave {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

}  // namespace

std::vector<cdouble> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw ShapeError("rfft: empty input");
  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(n / 2 + 1);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan.get());
  std::vector<cdouble> result(n / 2 + 1);
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

std::vector<double> irfft(std::span<const cdouble> spectrum, std::size_t n) {
  if (n == 0) throw ShapeError("irfft: zero length");
  if (spectrum.size() != n / 2 + 1) {
    throw ShapeError("irfft: expected " + std::to_string(n / 2 + 1) + " bins, got " +
                     std::to_string(spectrum.size()));
  }
  auto in = fftw_buffer<fftw_complex>(spectrum.size());
  auto out = fftw_buffer<double>(n);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    in[k][0] = spectrum[k].real();
    in[k][1] = spectrum[k].imag();
  }
  // DC and Nyquist of a real signal are real.
  in[0][1] = 0.0;
  if (n % 2 == 0) in[n / 2][1] = 0.0;
  fftw_execute(plan.get());
  std::vector<double> result(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = out[i] * scale;
  return result;
}

std::vector<double> rfft_frequencies(std::size_t n, double sample_rate) {
  std::vector<double> f(n / 2 + 1);
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = static_cast<double>(k) * sample_rate / static_cast<double>(n);
  }
  return f;
}

std::vector<double> hann_symmetric(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n <= 1) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

std::vector<double> hann_periodic(std::size_t n) {
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

}  // namespace leakwave
