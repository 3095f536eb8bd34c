#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "accent/error.hpp"

namespace accent {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Smallest power of two that is >= n (n >= 1).
inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Iterative in-place radix-2 decimation-in-time FFT with precomputed
/// twiddles and bit-reversal table. Computes X[k] = sum_n x[n] e^{-i 2 pi k n / N}.
template <typename Scalar>
class Radix2Fft {
 public:
  using Complex = std::complex<Scalar>;

  explicit Radix2Fft(std::size_t size) : size_(size) {
    if (!is_power_of_two(size)) {
      throw InvalidArgument("FFT size must be a power of two, got " + std::to_string(size));
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < size) ++bits;
    reversed_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      reversed_[i] = r;
    }
    twiddles_.resize(size / 2);
    for (std::size_t k = 0; k < size / 2; ++k) {
      const Scalar angle = -2 * std::numbers::pi_v<Scalar> * static_cast<Scalar>(k) /
                           static_cast<Scalar>(size);
      twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
    }
  }

  std::size_t size() const { return size_; }

  void forward(std::span<Complex> data) const {
    if (data.size() != size_) throw DimensionError("FFT buffer length does not match plan size");
    for (std::size_t i = 0; i < size_; ++i) {
      if (i < reversed_[i]) std::swap(data[i], data[reversed_[i]]);
    }
    for (std::size_t len = 2; len <= size_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = size_ / len;
      for (std::size_t start = 0; start < size_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const Complex t = twiddles_[j * stride] * data[start + j + half];
          const Complex u = data[start + j];
          data[start + j] = u + t;
          data[start + j + half] = u - t;
        }
      }
    }
  }

 private:
  std::size_t size_;
  std::vector<std::size_t> reversed_;
  std::vector<Complex> twiddles_;
};

}  // namespace accent
