#include "cmdnls/fft.hpp"

#include <mutex>

namespace cmdnls {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  buf_ = fftw_alloc_complex(static_cast<size_t>(n));
  fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(buf_);
}

void Fft::forward() { fftw_execute(fwd_); }
void Fft::backward() { fftw_execute(bwd_); }

}  // namespace cmdnls
