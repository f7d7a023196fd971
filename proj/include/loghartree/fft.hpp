#ifndef LOGHARTREE_FFT_HPP
#define LOGHARTREE_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace loghartree::fft {

using Complex = std::complex<double>;

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Real-to-complex 2D transform pair for an M x M grid, with owned buffers.
// Plans use FFTW_ESTIMATE so planning is fast and run-to-run deterministic.
// Instances are not thread-safe; give each concurrent user its own.
class Rfft2 {
 public:
  explicit Rfft2(int m) : m_(m), rbuf_(static_cast<std::size_t>(m) * m), cbuf_(static_cast<std::size_t>(m) * (m / 2 + 1)) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_2d(m, m, rbuf_.data(),
                                reinterpret_cast<fftw_complex*>(cbuf_.data()),
                                FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(m, m, reinterpret_cast<fftw_complex*>(cbuf_.data()),
                                rbuf_.data(), FFTW_ESTIMATE);
  }
  ~Rfft2() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Rfft2(const Rfft2&) = delete;
  Rfft2& operator=(const Rfft2&) = delete;

  int size() const { return m_; }
  int spectrum_cols() const { return m_ / 2 + 1; }
  std::size_t spectrum_size() const { return static_cast<std::size_t>(m_) * spectrum_cols(); }

  void forward(std::span<const double> in, std::vector<Complex>& out) {
    std::memcpy(rbuf_.data(), in.data(), sizeof(double) * rbuf_.size());
    fftw_execute(fwd_);
    out.assign(cbuf_.begin(), cbuf_.end());
  }

  // c2r destroys its input; `spec` is taken by value into the work buffer.
  // Output is normalized so that backward(forward(x)) == x.
  void backward(std::span<const Complex> spec, std::vector<double>& out) {
    std::memcpy(cbuf_.data(), spec.data(), sizeof(Complex) * cbuf_.size());
    fftw_execute(bwd_);
    double scale = 1.0 / (static_cast<double>(m_) * m_);
    out.resize(rbuf_.size());
    for (std::size_t i = 0; i < rbuf_.size(); ++i) out[i] = rbuf_[i] * scale;
  }

 private:
  int m_;
  std::vector<double> rbuf_;
  std::vector<Complex> cbuf_;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

}  // namespace loghartree::fft

#endif
