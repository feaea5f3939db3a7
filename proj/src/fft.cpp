#include "gaborstab/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace gaborstab::fft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void run(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) return;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void forward(std::vector<std::complex<double>>& data) { run(data, FFTW_FORWARD); }
void backward(std::vector<std::complex<double>>& data) { run(data, FFTW_BACKWARD); }

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(out_len);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  forward(fa);
  forward(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  backward(fa);
  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real() * scale;
  return out;
}

}  // namespace gaborstab::fft
