// Copyright rbeig contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rbeig {

/// Gauss-Legendre rule on [-1,1], exact for polynomials up to degree 2*order-1.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_rule(int order) {
  GaussRule rule;
  rule.points.resize(order);
  rule.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n with the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

inline const GaussRule& gauss_rule(int order) {
  if (order < 1 || order > 10)
    throw std::invalid_argument("gauss_rule: order must be in [1,10]");
  static const std::array<GaussRule, 10> rules = [] {
    std::array<GaussRule, 10> r;
    for (int n = 1; n <= 10; ++n) r[n - 1] = detail::compute_gauss_rule(n);
    return r;
  }();
  return rules[order - 1];
}

/// Values and first derivatives of the p+1 B-splines active at one point.
struct BasisEval {
  int first = 0;  ///< index of the first active basis function
  std::vector<double> values;
  std::vector<double> derivs;
};

/// Open (clamped) univariate knot vector of degree p >= 1.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots)
      : degree_(degree), knots_(std::move(knots)) {
    validate();
  }

  /// Open uniform knot vector with n_elements spans on [lo, hi].
  static KnotVector uniform_open(int degree, int n_elements, double lo = 0.0,
                                 double hi = 1.0) {
    if (n_elements < 1) throw std::invalid_argument("uniform_open: n_elements < 1");
    std::vector<double> k;
    k.insert(k.end(), degree + 1, lo);
    for (int i = 1; i < n_elements; ++i)
      k.push_back(lo + (hi - lo) * double(i) / n_elements);
    k.insert(k.end(), degree + 1, hi);
    return KnotVector(degree, std::move(k));
  }

  /// Open knot vector from breakpoints with per-breakpoint interior multiplicities.
  static KnotVector from_breakpoints(int degree, const std::vector<double>& breaks,
                                     const std::vector<int>& mult) {
    if (breaks.size() < 2 || breaks.size() != mult.size() + 2)
      throw std::invalid_argument("from_breakpoints: need interior multiplicity per interior breakpoint");
    std::vector<double> k;
    k.insert(k.end(), degree + 1, breaks.front());
    for (std::size_t i = 1; i + 1 < breaks.size(); ++i)
      k.insert(k.end(), mult[i - 1], breaks[i]);
    k.insert(k.end(), degree + 1, breaks.back());
    return KnotVector(degree, std::move(k));
  }

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  int num_basis() const { return int(knots_.size()) - degree_ - 1; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Distinct knot values (element boundaries).
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (double k : knots_)
      if (b.empty() || k > b.back()) b.push_back(k);
    return b;
  }

  int find_span(double x) const {
    const int n = num_basis();
    if (x < knots_[degree_] || x > knots_[n])
      throw std::domain_error("KnotVector: evaluation point outside knot range");
    if (x >= knots_[n]) return n - 1;
    auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n, x);
    return int(it - knots_.begin()) - 1;
  }

  /// Cox-de Boor evaluation of values and first derivatives at x.
  BasisEval eval_basis(double x) const {
    const int p = degree_;
    const int span = find_span(x);
    BasisEval out;
    out.first = span - p;
    out.values.assign(p + 1, 0.0);
    out.derivs.assign(p + 1, 0.0);

    // ndu[j][r]: basis of degree j, local index r (triangular table).
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> left(p + 1), right(p + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
      left[j] = x - knots_[span + 1 - j];
      right[j] = knots_[span + j] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        double denom = right[r + 1] + left[j - r];
        double temp = denom != 0.0 ? ndu[j - 1][r] / denom : 0.0;
        ndu[j][r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      ndu[j][j] = saved;
    }
    for (int r = 0; r <= p; ++r) out.values[r] = ndu[p][r];

    // First derivative from the degree p-1 row.
    for (int r = 0; r <= p; ++r) {
      double d = 0.0;
      int i = span - p + r;
      double dl = knots_[i + p] - knots_[i];
      double dr = knots_[i + p + 1] - knots_[i + 1];
      if (r > 0 && dl != 0.0) d += p * ndu[p - 1][r - 1] / dl;
      if (r < p && dr != 0.0) d -= p * ndu[p - 1][r] / dr;
      out.derivs[r] = d;
    }
    return out;
  }

  /// Greville abscissa of basis function i (mean of p consecutive interior knots).
  double greville(int i) const {
    double s = 0.0;
    for (int j = 1; j <= degree_; ++j) s += knots_[i + j];
    return s / degree_;
  }

 private:
  void validate() const {
    if (degree_ < 1) throw std::invalid_argument("KnotVector: degree must be >= 1");
    if (int(knots_.size()) < 2 * (degree_ + 1))
      throw std::invalid_argument("KnotVector: too few knots for an open vector");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (knots_[i] < knots_[i - 1])
        throw std::invalid_argument("KnotVector: knots must be nondecreasing");
    for (int i = 0; i <= degree_; ++i) {
      if (knots_[i] != knots_.front() ||
          knots_[knots_.size() - 1 - i] != knots_.back())
        throw std::invalid_argument("KnotVector: knot vector must be open");
    }
    if (knots_.front() >= knots_.back())
      throw std::invalid_argument("KnotVector: empty parameter range");
    // Interior multiplicity at most p.
    std::size_t i = degree_ + 1;
    while (i + std::size_t(degree_) + 1 < knots_.size()) {
      std::size_t j = i;
      while (j + std::size_t(degree_) + 1 < knots_.size() && knots_[j] == knots_[i]) ++j;
      if (int(j - i) > degree_)
        throw std::invalid_argument("KnotVector: interior knot multiplicity exceeds degree");
      i = j > i ? j : i + 1;
    }
  }

  int degree_ = 1;
  std::vector<double> knots_;
};

/// Tensor-product B-spline space over three parametric directions.
class TensorSplineSpace {
 public:
  TensorSplineSpace() = default;
  TensorSplineSpace(KnotVector kv0, KnotVector kv1, KnotVector kv2)
      : kv_{std::move(kv0), std::move(kv1), std::move(kv2)} {}

  const KnotVector& kv(int dir) const { return kv_.at(dir); }
  int dim(int dir) const { return kv_[dir].num_basis(); }
  int dim() const { return dim(0) * dim(1) * dim(2); }

  /// Linear index with direction 0 fastest.
  int index(int i0, int i1, int i2) const {
    return i0 + dim(0) * (i1 + dim(1) * i2);
  }

  std::array<int, 3> unravel(int idx) const {
    std::array<int, 3> i;
    i[0] = idx % dim(0);
    i[1] = (idx / dim(0)) % dim(1);
    i[2] = idx / (dim(0) * dim(1));
    return i;
  }

  /// Scalar indices of the control-point layer on face f (f/2 = direction, f%2 = side).
  std::vector<int> face_layer(int f) const {
    const int d = f / 2, side = f % 2;
    const int fixed = side ? dim(d) - 1 : 0;
    std::vector<int> out;
    std::array<int, 3> i{};
    const int a = d == 0 ? 1 : 0;
    const int b = d == 2 ? 1 : 2;
    out.reserve(dim(a) * dim(b));
    for (int ib = 0; ib < dim(b); ++ib)
      for (int ia = 0; ia < dim(a); ++ia) {
        i[d] = fixed;
        i[a] = ia;
        i[b] = ib;
        out.push_back(index(i[0], i[1], i[2]));
      }
    return out;
  }

 private:
  std::array<KnotVector, 3> kv_{};
};

/// In-plane axes of face f, in ascending direction order.
inline std::array<int, 2> face_axes(int f) {
  const int d = f / 2;
  return d == 0 ? std::array<int, 2>{1, 2}
         : d == 1 ? std::array<int, 2>{0, 2}
                  : std::array<int, 2>{0, 1};
}

}  // namespace rbeig
