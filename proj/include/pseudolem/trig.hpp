#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "pseudolem/error.hpp"

namespace pseudolem {

// Trigonometric interpolant of N equispaced samples of a 2pi-periodic complex
// function, x_j = g(2 pi j / N). The Nyquist mode (even N) is split evenly
// between +N/2 and -N/2 so that real data interpolates to real values.
class TrigInterpolant {
 public:
  TrigInterpolant() = default;

  explicit TrigInterpolant(const std::vector<Complex>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw PreconditionError("trigonometric interpolation needs at least two samples");
    Eigen::FFT<double> fft;
    std::vector<Complex> in(samples), spec;
    fft.fwd(spec, in);
    const int N = static_cast<int>(n);
    kmin_ = -(N / 2);
    coeffs_.assign(n, Complex{0.0});
    for (int k = kmin_; k < kmin_ + N; ++k) {
      const int idx = ((k % N) + N) % N;
      coeffs_[static_cast<std::size_t>(k - kmin_)] = spec[static_cast<std::size_t>(idx)] / static_cast<double>(N);
    }
    if (N % 2 == 0) {
      // Split the Nyquist mode across +-N/2.
      const Complex c = coeffs_[0];
      coeffs_[0] = 0.5 * c;
      nyquist_ = 0.5 * c;
    }
  }

  static TrigInterpolant from_real(const std::vector<double>& samples) {
    std::vector<Complex> c(samples.begin(), samples.end());
    return TrigInterpolant(c);
  }

  std::size_t size() const { return coeffs_.size(); }

  Complex operator()(double t) const { return eval(t, 0); }
  Complex derivative(double t) const { return eval(t, 1); }
  Complex second_derivative(double t) const { return eval(t, 2); }

  // Coefficient of e^{ikt}.
  Complex coeff(int k) const {
    const int N = static_cast<int>(coeffs_.size());
    if (N % 2 == 0 && k == N / 2) return nyquist_;
    if (k < kmin_ || k >= kmin_ + N) return Complex{0.0};
    return coeffs_[static_cast<std::size_t>(k - kmin_)];
  }

  // Samples of the interpolant at m equispaced points (zero-padded or
  // truncated spectrum).
  std::vector<Complex> resample(std::size_t m) const {
    const int M = static_cast<int>(m);
    const int N = static_cast<int>(coeffs_.size());
    std::vector<Complex> spec(m, Complex{0.0});
    for (int k = kmin_; k <= kmin_ + N; ++k) {
      const Complex c = coeff(k);
      if (c == Complex{0.0}) continue;
      // Modes beyond the target Nyquist limit are truncated; +-M/2 alias onto
      // the same sample index and are summed.
      if (2 * std::abs(k) > M) continue;
      const int idx = ((k % M) + M) % M;
      spec[static_cast<std::size_t>(idx)] += c * static_cast<double>(M);
    }
    Eigen::FFT<double> fft;
    std::vector<Complex> out;
    fft.inv(out, spec);
    return out;
  }

 private:
  Complex eval(double t, int deriv) const {
    const int N = static_cast<int>(coeffs_.size());
    const Complex step = std::polar(1.0, t);
    Complex e = std::polar(1.0, kmin_ * t);
    Complex acc = 0.0;
    for (int j = 0; j < N; ++j) {
      const int k = kmin_ + j;
      Complex term = coeffs_[static_cast<std::size_t>(j)] * e;
      if (deriv == 1) term *= Complex{0.0, static_cast<double>(k)};
      if (deriv == 2) term *= -static_cast<double>(k) * k;
      acc += term;
      e *= step;
      // Refresh the running power periodically to bound rounding drift.
      if ((j & 63) == 63) e = std::polar(1.0, (k + 1) * t);
    }
    if (N % 2 == 0) {
      const int k = N / 2;
      Complex term = nyquist_ * std::polar(1.0, k * t);
      if (deriv == 1) term *= Complex{0.0, static_cast<double>(k)};
      if (deriv == 2) term *= -static_cast<double>(k) * k;
      acc += term;
    }
    return acc;
  }

  std::vector<Complex> coeffs_;  // k = kmin_ .. kmin_+N-1
  Complex nyquist_{0.0};
  int kmin_ = 0;
};

inline std::vector<double> uniform_angles(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
  return t;
}

}  // namespace pseudolem
