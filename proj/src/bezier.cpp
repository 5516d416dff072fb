#include "bgc/bezier.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace bgc {
namespace {

using BinomialTable = std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1>;

constexpr BinomialTable make_binomials() {
  BinomialTable table{};
  for (int n = 0; n <= kMaxDegree; ++n) {
    table[n][0] = 1.0;
    for (int k = 1; k <= n; ++k) table[n][k] = table[n - 1][k - 1] + (k <= n - 1 ? table[n - 1][k] : 0.0);
  }
  return table;
}

constexpr BinomialTable kBinomials = make_binomials();

// powers[e] = x^e for e = 0..n
void powers(double x, int n, double* out) {
  out[0] = 1.0;
  for (int e = 1; e <= n; ++e) out[e] = out[e - 1] * x;
}

// B^n_i(t) for i = 0..n
void bernstein(int n, double t, double* out) {
  double tp[kMaxDegree + 1];
  double sp[kMaxDegree + 1];
  powers(t, n, tp);
  powers(1.0 - t, n, sp);
  for (int i = 0; i <= n; ++i) out[i] = kBinomials[n][i] * tp[i] * sp[n - i];
}

// d/dt B^n_i(t) = n (B^{n-1}_{i-1} - B^{n-1}_i)
void bernstein_derivative(int n, double t, double* out) {
  double lower[kMaxDegree + 1];
  bernstein(n - 1, t, lower);
  for (int i = 0; i <= n; ++i) {
    const double left = i >= 1 ? lower[i - 1] : 0.0;
    const double right = i <= n - 1 ? lower[i] : 0.0;
    out[i] = n * (left - right);
  }
}

void check_domain(const Patch& patch, double u, double v) {
  if (!in_domain(kind_of(patch), u, v)) {
    std::ostringstream msg;
    msg << "parameter (" << u << ", " << v << ") outside the "
        << (kind_of(patch) == PatchKind::tensor ? "unit square" : "unit triangle");
    throw Error(ErrorCategory::domain, msg.str());
  }
}

}  // namespace

double binomial(int n, int k) {
  if (n < 0 || n > kMaxDegree || k < 0 || k > n) return 0.0;
  return kBinomials[n][k];
}

bool in_domain(PatchKind kind, double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v)) return false;
  if (u < 0.0 || v < 0.0) return false;
  if (kind == PatchKind::tensor) return u <= 1.0 && v <= 1.0;
  return u + v <= 1.0 + 1e-15;
}

void basis_weights_into(const Patch& patch, double u, double v, std::span<double> out) {
  if (const auto* t = std::get_if<TensorPatch>(&patch)) {
    const int m = t->degree_u();
    const int n = t->degree_v();
    double bu[kMaxDegree + 1];
    double bv[kMaxDegree + 1];
    bernstein(m, u, bu);
    bernstein(n, v, bv);
    std::size_t idx = 0;
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= n; ++j) out[idx++] = bu[i] * bv[j];
    return;
  }
  const auto& tri = std::get<TrianglePatch>(patch);
  const int n = tri.degree();
  double up[kMaxDegree + 1];
  double vp[kMaxDegree + 1];
  double wp[kMaxDegree + 1];
  powers(u, n, up);
  powers(v, n, vp);
  powers(1.0 - u - v, n, wp);
  std::size_t idx = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j) {
      const int k = n - i - j;
      out[idx++] = kBinomials[n][i] * kBinomials[n - i][j] * up[i] * vp[j] * wp[k];
    }
}

void basis_derivatives_into(const Patch& patch, double u, double v, std::span<double> du,
                            std::span<double> dv) {
  if (const auto* t = std::get_if<TensorPatch>(&patch)) {
    const int m = t->degree_u();
    const int n = t->degree_v();
    double bu[kMaxDegree + 1];
    double bv[kMaxDegree + 1];
    double dbu[kMaxDegree + 1];
    double dbv[kMaxDegree + 1];
    bernstein(m, u, bu);
    bernstein(n, v, bv);
    bernstein_derivative(m, u, dbu);
    bernstein_derivative(n, v, dbv);
    std::size_t idx = 0;
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= n; ++j, ++idx) {
        du[idx] = dbu[i] * bv[j];
        dv[idx] = bu[i] * dbv[j];
      }
    return;
  }
  // d/du of u^i v^j w^k with w = 1 - u - v: i u^(i-1) v^j w^k - k u^i v^j w^(k-1)
  const auto& tri = std::get<TrianglePatch>(patch);
  const int n = tri.degree();
  double up[kMaxDegree + 1];
  double vp[kMaxDegree + 1];
  double wp[kMaxDegree + 1];
  powers(u, n, up);
  powers(v, n, vp);
  powers(1.0 - u - v, n, wp);
  std::size_t idx = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j, ++idx) {
      const int k = n - i - j;
      const double c = kBinomials[n][i] * kBinomials[n - i][j];
      const double dw = k > 0 ? k * wp[k - 1] : 0.0;
      const double d_u = i > 0 ? i * up[i - 1] : 0.0;
      const double d_v = j > 0 ? j * vp[j - 1] : 0.0;
      du[idx] = c * (d_u * vp[j] * wp[k] - up[i] * vp[j] * dw);
      dv[idx] = c * (up[i] * d_v * wp[k] - up[i] * vp[j] * dw);
    }
}

Vec3 combine(std::span<const double> weights, std::span<const Vec3> points) {
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) sum += weights[i] * points[i];
  return sum;
}

BasisWeights basis_weights(const Patch& patch, double u, double v) {
  check_domain(patch, u, v);
  BasisWeights result;
  result.weights.resize(control_count(patch));
  basis_weights_into(patch, u, v, result.weights);
  return result;
}

Vec3 patch_point(const Patch& patch, double u, double v) {
  check_domain(patch, u, v);
  double w[(kMaxDegree + 1) * (kMaxDegree + 1)];
  const std::span<double> weights(w, control_count(patch));
  basis_weights_into(patch, u, v, weights);
  return combine(weights, control_points(patch));
}

std::pair<Vec3, Vec3> patch_partials(const Patch& patch, double u, double v) {
  check_domain(patch, u, v);
  const std::size_t count = control_count(patch);
  double wu[(kMaxDegree + 1) * (kMaxDegree + 1)];
  double wv[(kMaxDegree + 1) * (kMaxDegree + 1)];
  basis_derivatives_into(patch, u, v, {wu, count}, {wv, count});
  const auto pts = control_points(patch);
  return {combine({wu, count}, pts), combine({wv, count}, pts)};
}

}  // namespace bgc
