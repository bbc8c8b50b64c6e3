#pragma once

#include <fftw3.h>

#include "cmdnls/common.hpp"

namespace cmdnls {

// Owning wrapper around a pair of in-place FFTW plans of fixed length.
// FFTW planning is not thread-safe, so construction is serialized; execution
// on distinct objects may run concurrently.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  cplx* data() { return reinterpret_cast<cplx*>(buf_); }

  // Unnormalized transforms: forward uses e^{-2 pi i km/n}, backward e^{+...}.
  void forward();
  void backward();

 private:
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace cmdnls
