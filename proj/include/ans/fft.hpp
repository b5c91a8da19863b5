#pragma once

#include <complex>
#include <mutex>

namespace ans {

/// Sets the FFTW thread count used by plans created afterwards. Results are
/// bitwise reproducible for a fixed count.
void set_fft_threads(int threads);
int fft_threads();

/// Reads ANS_THREADS (default 1).
int default_thread_count();

namespace detail {

/// Real-to-complex plan pair for one grid shape. Execution is reentrant;
/// planning is serialized internally. Buffers must be 64-byte aligned.
class FftPlans {
 public:
  FftPlans(int n_h, int n_v);
  ~FftPlans();
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  /// Unnormalized forward DFT of n_h*n_h*n_v reals.
  void forward(const double* in, std::complex<double>* out) const;
  /// Unnormalized backward DFT; `in` is clobbered.
  void inverse(std::complex<double>* in, double* out) const;

 private:
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace detail
}  // namespace ans
