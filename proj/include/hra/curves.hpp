#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "hra/errors.hpp"

namespace hra {

// Expected-action curve of the two-hypothesis toy environment, parameterised
// by exploration probability p or by per-episode depth D = p·ln 2.
template <typename Scalar = double>
struct EstarCurve {
  int k = 0;
  int M = 0;
  Scalar c0 = 0;
  Scalar c1 = 0;

  static constexpr Scalar ln2 = std::numbers::ln2_v<Scalar>;
  Scalar d_max() const { return ln2; }

  Scalar A_of_p(Scalar p) const {
    if (!(p >= 0 && p <= 1)) throw ValidationError("p must lie in [0, 1]");
    return p * (1 + k - Scalar(k + M) / 2) + Scalar(k + M) / 2;
  }
  Scalar A_of_D(Scalar D) const {
    check_domain(D);
    return c0 - c1 * D;
  }
  Scalar S_of_D(Scalar D) const { return 1 / A_of_D(D); }
  Scalar d2S(Scalar D) const {
    const Scalar a = A_of_D(D);
    return 2 * c1 * c1 / (a * a * a);
  }
  Scalar optimal_actions() const { return Scalar(1 + k); }

 private:
  void check_domain(Scalar D) const {
    if (!(D >= 0 && D <= ln2 * (1 + 1e-12))) throw ValidationError("D must lie in [0, ln 2]");
  }
};

template <typename Scalar = double>
EstarCurve<Scalar> estar_curve(int k, int M) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (M <= k + 2) throw ValidationError("M > k + 2 is required for c1 > 0");
  EstarCurve<Scalar> c;
  c.k = k;
  c.M = M;
  c.c0 = Scalar(k + M) / 2;
  c.c1 = Scalar(M - k - 2) / (2 * std::numbers::ln2_v<Scalar>);
  return c;
}

// Affine action curve A(D) = slope·D + intercept of a uniform-information
// environment, on D ∈ [0, d_max].
template <typename Scalar = double>
struct UisCurve {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar d_max = 0;

  Scalar A_of_D(Scalar D) const {
    if (!(D >= 0 && D <= d_max * (1 + 1e-12))) throw ValidationError("D outside the curve domain");
    return slope * D + intercept;
  }
  Scalar S_of_D(Scalar D) const { return 1 / A_of_D(D); }
};

template <typename Scalar = double>
UisCurve<Scalar> uis_curve(Scalar delta_h, Scalar alpha, Scalar beta, int k, int M) {
  if (!(delta_h > 0)) throw ValidationError("delta_h must be positive");
  if (!(alpha >= 0 && alpha < 1)) throw ValidationError("alpha must lie in [0, 1)");
  if (!(beta >= 0)) throw ValidationError("beta must be nonnegative");
  if (!(M > k && k >= 1)) throw ValidationError("M > k >= 1 is required");
  const Scalar coef = 1 / delta_h - beta * (M - k);
  if (!(coef < 0)) throw ValidationError("1/delta_h - beta*(M-k) < 0 violated: exploration does not save actions");
  UisCurve<Scalar> c;
  c.slope = 1 / delta_h + beta * (k - M);
  c.intercept = M + alpha * (k - M);
  c.d_max = (1 - alpha) / beta;  // correctness probability reaches 1
  return c;
}

// Samples S on n uniformly spaced points of [0, d_max].
template <typename Curve>
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> sample_curve(const Curve& curve, double d_max, int n) {
  if (n < 2) throw ValidationError("need at least two sample points");
  Eigen::ArrayXd D = Eigen::ArrayXd::LinSpaced(n, 0.0, d_max);
  D(n - 1) = d_max;
  Eigen::ArrayXd S(n);
  for (int i = 0; i < n; ++i) S(i) = static_cast<double>(curve.S_of_D(D(i)));
  return {D, S};
}

struct ConvexityCertificate {
  bool convex = false;
  double min_second_difference = 0.0;
};

// Strict convexity of uniformly spaced samples via central second differences.
ConvexityCertificate convexity_certificate(const Eigen::ArrayXd& D, const Eigen::ArrayXd& S);

struct TaylorCheck {
  double exact_loss = 0.0;
  double approx_loss = 0.0;
  double relative_error = 0.0;
};

TaylorCheck taylor_loss_check(const EstarCurve<double>& curve, double epsilon);

}  // namespace hra
