#include "ans/fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace ans {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& thread_setting() {
  static int threads = 1;
  return threads;
}

}  // namespace

void set_fft_threads(int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  std::lock_guard lock(planner_mutex());
  static bool initialized = false;
  if (!initialized) {
    if (fftw_init_threads() == 0)
      throw std::runtime_error("fftw_init_threads failed");
    initialized = true;
  }
  fftw_plan_with_nthreads(threads);
  thread_setting() = threads;
}

int fft_threads() { return thread_setting(); }

int default_thread_count() {
  if (const char* env = std::getenv("ANS_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

namespace detail {

FftPlans::FftPlans(int n_h, int n_v) {
  std::lock_guard lock(planner_mutex());
  const std::size_t nreal = static_cast<std::size_t>(n_h) * n_h * n_v;
  const std::size_t ncplx = static_cast<std::size_t>(n_h) * n_h * (n_v / 2 + 1);
  double* r = fftw_alloc_real(nreal);
  fftw_complex* c = fftw_alloc_complex(ncplx);
  const unsigned flags = FFTW_ESTIMATE;
  forward_plan_ = fftw_plan_dft_r2c_3d(n_h, n_h, n_v, r, c, flags);
  inverse_plan_ = fftw_plan_dft_c2r_3d(n_h, n_h, n_v, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr)
    throw std::runtime_error("FFTW planning failed");
}

FftPlans::~FftPlans() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

// Callers pass 64-byte aligned buffers (AlignedVector), matching the
// alignment the plans were created with.
void FftPlans::forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void FftPlans::inverse(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace detail
}  // namespace ans
