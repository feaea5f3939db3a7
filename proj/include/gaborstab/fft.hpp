#pragma once

#include <complex>
#include <vector>

namespace gaborstab::fft {

// Unnormalized in-place DFT.
//   forward:  X_k = sum_j x_j e^{-2 pi i jk/N}
//   backward: X_k = sum_j x_j e^{+2 pi i jk/N}
// Thread-safe; plans are created under a process-wide lock.
void forward(std::vector<std::complex<double>>& data);
void backward(std::vector<std::complex<double>>& data);

// Linear convolution of two real sequences (length a + b - 1).
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gaborstab::fft
