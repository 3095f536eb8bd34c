#pragma once

// Test helpers: a WAV byte builder and brute-force oracles that share no code
// with the library.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "accent/features.hpp"
#include "accent/kernels.hpp"
#include "accent/svm.hpp"

namespace accent::test {

inline void put_le(std::vector<unsigned char>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

/// RIFF/WAVE image with raw little-endian sample bytes. `format` is 1 (PCM),
/// 3 (float) or 0xFFFE (extensible with the given sub-format).
inline std::vector<unsigned char> wav_bytes(int channels, int rate, int bits, const std::vector<unsigned char>& data,
                                            std::uint16_t format = 1, std::uint16_t sub_format = 1) {
  std::vector<unsigned char> fmt;
  put_le(fmt, format, 2);
  put_le(fmt, static_cast<std::uint64_t>(channels), 2);
  put_le(fmt, static_cast<std::uint64_t>(rate), 4);
  const int block = channels * bits / 8;
  put_le(fmt, static_cast<std::uint64_t>(rate * block), 4);
  put_le(fmt, static_cast<std::uint64_t>(block), 2);
  put_le(fmt, static_cast<std::uint64_t>(bits), 2);
  if (format == 0xFFFE) {
    put_le(fmt, 22, 2);
    put_le(fmt, static_cast<std::uint64_t>(bits), 2);
    put_le(fmt, 0, 4);
    put_le(fmt, sub_format, 2);
    const unsigned char guid_tail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                         0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
    fmt.insert(fmt.end(), guid_tail, guid_tail + 14);
  }
  std::vector<unsigned char> out = {'R', 'I', 'F', 'F'};
  put_le(out, 4 + 8 + fmt.size() + 8 + data.size() + (data.size() & 1), 4);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_le(out, fmt.size(), 4);
  out.insert(out.end(), fmt.begin(), fmt.end());
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_le(out, data.size(), 4);
  out.insert(out.end(), data.begin(), data.end());
  if (data.size() & 1) out.push_back(0);
  return out;
}

inline std::vector<unsigned char> pcm16(const std::vector<std::int16_t>& samples) {
  std::vector<unsigned char> out;
  for (auto s : samples) put_le(out, static_cast<std::uint16_t>(s), 2);
  return out;
}

/// O(N^2) DFT power of a real sequence zero-padded to n, all n bins.
inline Eigen::VectorXd naive_dft_power(const Eigen::VectorXd& x, Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<long double> acc = 0;
    for (Eigen::Index t = 0; t < x.size(); ++t) {
      const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k * t % n) /
                                static_cast<long double>(n);
      acc += static_cast<long double>(x[t]) * std::complex<long double>(std::cos(angle), std::sin(angle));
    }
    out[k] = static_cast<double>(std::norm(acc));
  }
  return out;
}

/// DCT-III inverse of the unnormalized DCT-II c_j = sum_m S_m cos(pi j (m + 1/2) / M).
inline Eigen::VectorXd dct3_inverse(const Eigen::VectorXd& c) {
  const Eigen::Index m_total = c.size();
  Eigen::VectorXd s(m_total);
  for (Eigen::Index m = 0; m < m_total; ++m) {
    long double acc = static_cast<long double>(c[0]) / 2.0L;
    for (Eigen::Index j = 1; j < m_total; ++j) {
      acc += static_cast<long double>(c[j]) *
             std::cos(std::numbers::pi_v<long double> * j * (m + 0.5L) / static_cast<long double>(m_total));
    }
    s[m] = static_cast<double>(2.0L * acc / static_cast<long double>(m_total));
  }
  return s;
}

/// Multivariate normal density evaluated directly with a full-pivot LU
/// determinant and inverse.
inline double gaussian_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  const Eigen::VectorXd d = x - mean;
  const double quad = d.dot(lu.inverse() * d);
  const double p = static_cast<double>(x.size());
  return std::exp(-0.5 * quad) / std::sqrt(std::pow(2.0 * std::numbers::pi, p) * lu.determinant());
}

/// Log of the same density, for points far enough out that it underflows.
inline double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  const Eigen::VectorXd d = x - mean;
  const double p = static_cast<double>(x.size());
  return -0.5 * d.dot(lu.inverse() * d) - 0.5 * std::log(lu.determinant()) - 0.5 * p * std::log(2.0 * std::numbers::pi);
}

/// Two-class dataset: class k drawn from N(means.row(k), L_k L_k').
inline Dataset gaussian_dataset(std::mt19937_64& gen, const Eigen::MatrixXd& means,
                                const std::vector<Eigen::MatrixXd>& chol, const std::vector<int>& counts) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index p = means.cols();
  Dataset data;
  int total = 0;
  for (int c : counts) total += c;
  data.points.resize(total, p);
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    for (int i = 0; i < counts[k]; ++i, ++row) {
      Eigen::VectorXd z(p);
      for (Eigen::Index d = 0; d < p; ++d) z[d] = normal(gen);
      data.points.row(row) = means.row(static_cast<Eigen::Index>(k)) + (chol[k] * z).transpose();
      data.labels.push_back(static_cast<int>(k));
      data.ids.push_back("p" + std::to_string(row));
    }
  }
  return data;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  return m;
}

inline Eigen::VectorXd class_mean(const Dataset& d, int label) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d.dim());
  int n = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d.labels[static_cast<std::size_t>(i)] != label) continue;
    m += d.points.row(i).transpose();
    ++n;
  }
  return m / n;
}

/// Sum of outer products of deviations from `mean` over one class.
inline Eigen::MatrixXd class_scatter(const Dataset& d, int label, const Eigen::VectorXd& mean) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d.dim(), d.dim());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d.labels[static_cast<std::size_t>(i)] != label) continue;
    const Eigen::VectorXd c = d.points.row(i).transpose() - mean;
    s += c * c.transpose();
  }
  return s;
}

/// argmax_k prior_k * N(x; mean_k, cov_k), compared in log space, ties to the
/// lower index.
inline int bayes_argmax(const std::vector<double>& priors, const std::vector<Eigen::VectorXd>& means,
                        const std::vector<Eigen::MatrixXd>& covs, const Eigen::VectorXd& x) {
  int best = 0;
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < priors.size(); ++k) {
    const double v = std::log(priors[k]) + gaussian_log_density(x, means[k], covs[k]);
    if (v > top) {
      top = v;
      best = static_cast<int>(k);
    }
  }
  return best;
}

/// Largest amount by which any training point breaks its KKT condition, with
/// the decision value recomputed from the kernel directly. <= 0 when all hold.
inline double kkt_excess(const Dataset& d, const KernelSpec& kernel, const SvmSolution& s, double C, double tol) {
  double worst = -1.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    double f = s.bias;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      f += s.alphas[j] * s.y[j] * kernel_eval(kernel, d.points.row(j), d.points.row(i));
    }
    const double margin = s.y[i] * f;
    double excess = 0.0;
    if (s.alphas[i] == 0.0) {
      excess = (1.0 - tol) - margin;
    } else if (s.alphas[i] == C) {
      excess = margin - (1.0 + tol);
    } else {
      excess = std::abs(margin - 1.0) - tol;
    }
    worst = std::max(worst, excess);
  }
  return worst;
}

// Reference values computed once with 30-digit arithmetic.
inline constexpr double kMel2000 = 1521.35955415557559864359103579;
inline constexpr double kMel8000 = 2840.0230467083185957111335678;
inline constexpr double kMelStep8000Over27 = 105.186038766974762804116058067;
inline constexpr double kHzOfMel1521_5 = 2000.33649455838799935676721619;
inline constexpr double kExpMinus12_5 = 3.72665317207867099292485147595e-6;
inline constexpr double kTwoPointAlpha = 1.01865736036377404793890488238;  // 1 / (1 - e^-4)

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace accent::test
