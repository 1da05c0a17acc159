#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace solitonforge {

/// In-place 1D complex FFT pair backed by FFTW. `inverse` includes the 1/n
/// normalization so forward followed by inverse is the identity. Execution is
/// reentrant; plans are created under a process-wide lock.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<std::complex<double>> data) const;
  void inverse(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Shared plan for size n, created on first use.
std::shared_ptr<const FftPlan> fft_plan(std::size_t n);

}  // namespace solitonforge
