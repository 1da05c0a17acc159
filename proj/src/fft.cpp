#include "solitonforge/fft.hpp"

#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "solitonforge/errors.hpp"

namespace solitonforge {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans are made for aligned storage so FFTW may use its SIMD codelets; data
// is staged through a per-thread aligned buffer, which also keeps the chosen
// codelets independent of where the caller's array happens to live.
struct Staging {
  fftw_complex* data = nullptr;
  std::size_t size = 0;
  ~Staging() { fftw_free(data); }
  fftw_complex* get(std::size_t n) {
    if (n > size) {
      fftw_free(data);
      data = fftw_alloc_complex(n);
      size = n;
    }
    return data;
  }
};

fftw_complex* staged(std::span<std::complex<double>> data) {
  thread_local Staging staging;
  auto* buf = staging.get(data.size());
  std::memcpy(buf, data.data(), data.size() * sizeof(fftw_complex));
  return buf;
}

void unstage(fftw_complex* buf, std::span<std::complex<double>> data) {
  std::memcpy(data.data(), buf, data.size() * sizeof(fftw_complex));
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw SolverError(ErrorKind::InvalidArgument, "FFT size must be positive");
  std::lock_guard lock(planner_mutex());
  auto* buffer = fftw_alloc_complex(n);
  const unsigned flags = FFTW_ESTIMATE;
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(len, buffer, buffer, FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_1d(len, buffer, buffer, FFTW_BACKWARD, flags);
  fftw_free(buffer);
  if (!forward_plan_ || !inverse_plan_) {
    throw SolverError(ErrorKind::InvalidArgument, "FFTW could not create a plan");
  }
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  auto* buf = staged(data);
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
  unstage(buf, data);
}

void FftPlan::inverse(std::span<std::complex<double>> data) const {
  auto* buf = staged(data);
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), buf, buf);
  unstage(buf, data);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

std::shared_ptr<const FftPlan> fft_plan(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const FftPlan>(n);
  return slot;
}

}  // namespace solitonforge
