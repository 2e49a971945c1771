#include "blowup/specgrid.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr double pi = std::numbers::pi;

void check_length(const Grid& g, const Vec& v) {
  if (v.size() != g.size())
    throw Error(ErrorKind::invalid_argument, "sample length does not match grid");
}

// Clenshaw–Curtis weights on [-1,1] for x_j = cos(j*pi/N).
Vec clenshaw_curtis(int N) {
  Vec w = Vec::Zero(N + 1);
  Vec theta(N + 1);
  for (int j = 0; j <= N; ++j) theta(j) = pi * j / N;
  Vec v = Vec::Ones(N - 1);
  if (N % 2 == 0) {
    w(0) = w(N) = 1.0 / (N * N - 1.0);
    for (int k = 1; k < N / 2; ++k)
      for (int i = 1; i < N; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
    for (int i = 1; i < N; ++i) v(i - 1) -= std::cos(N * theta(i)) / (N * N - 1.0);
  } else {
    w(0) = w(N) = 1.0 / (static_cast<double>(N) * N);
    for (int k = 1; k <= (N - 1) / 2; ++k)
      for (int i = 1; i < N; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
  }
  for (int i = 1; i < N; ++i) w(i) = 2.0 * v(i - 1) / N;
  return w;
}

}  // namespace

GridPtr make_grid(int N, int refine) {
  if (N < 2) throw Error(ErrorKind::invalid_argument, "grid order N must be >= 2");
  if (refine < 4) throw Error(ErrorKind::invalid_argument, "refinement factor must be >= 4");
  auto g = std::make_shared<Grid>();
  g->N = N;
  const int n = N + 1;

  g->rho.resize(n);
  for (int j = 0; j < n; ++j) {
    const double s = std::sin(0.5 * pi * j / N);
    g->rho(j) = s * s;  // (1 - cos(j pi/N))/2 without cancellation
  }
  g->rho(0) = 0.0;
  g->rho(N) = 1.0;

  // Differentiation in x = cos(j pi/N), differences via the product formula.
  Vec c(n);
  for (int j = 0; j < n; ++j) c(j) = ((j == 0 || j == N) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  Mat Dx = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = 2.0 * std::sin(pi * (i + j) / (2.0 * N)) * std::sin(pi * (j - i) / (2.0 * N));
      Dx(i, j) = c(i) / c(j) / dx;
    }
  }
  for (int i = 0; i < n; ++i) Dx(i, i) = -Dx.row(i).sum();
  g->D = -2.0 * Dx;  // rho = (1 - x)/2

  g->w = 0.5 * clenshaw_curtis(N);

  g->bary.resize(n);
  for (int j = 0; j < n; ++j) g->bary(j) = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);

  const int m = refine * N + 1;
  g->fine.resize(m);
  g->to_fine.resize(m, n);
  for (int k = 0; k < m; ++k) {
    g->fine(k) = static_cast<double>(k) / (m - 1);
    g->to_fine.row(k) = interpolation_row(*g, g->fine(k)).transpose();
  }
  return g;
}

Vec differentiate(const Grid& g, const Vec& values) {
  check_length(g, values);
  return g.D * values;
}

Vec interpolation_row(const Grid& g, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::invalid_argument, "interpolation point outside [0,1]");
  const int n = g.size();
  Vec row = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (x == g.rho(j)) {
      row(j) = 1.0;
      return row;
    }
  }
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    row(j) = g.bary(j) / (x - g.rho(j));
    denom += row(j);
  }
  return row / denom;
}

double interpolate(const Grid& g, const Vec& values, double x) {
  check_length(g, values);
  return interpolation_row(g, x).dot(values);
}

double sup_norm(const Grid& g, const Vec& values) {
  check_length(g, values);
  const double nodes = values.cwiseAbs().maxCoeff();
  const Vec fine = (g.to_fine * values).cwiseAbs();
  Eigen::Index k = 0;
  const double refined = fine.maxCoeff(&k);
  // Polish the best refinement point with a Brent search on the interpolant.
  const Eigen::Index m = g.fine.size();
  const double lo = g.fine(std::max<Eigen::Index>(k - 1, 0)), hi = g.fine(std::min<Eigen::Index>(k + 1, m - 1));
  auto neg = [&](double x) { return -std::abs(interpolation_row(g, x).dot(values)); };
  const double polished = -boost::math::tools::brent_find_minima(neg, lo, hi, 52).second;
  return std::max({nodes, refined, polished});
}

Vec chebyshev_coefficients(const Grid& g, const Vec& values) {
  check_length(g, values);
  const int N = g.N;
  Vec a = Vec::Zero(N + 1);
  for (int k = 0; k <= N; ++k) {
    double s = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double h = (j == 0 || j == N) ? 0.5 : 1.0;
      s += h * values(j) * std::cos(pi * j * k / N);
    }
    a(k) = 2.0 * s / N;
  }
  a(0) *= 0.5;
  a(N) *= 0.5;
  return a;
}

Vec chebyshev_values(const Grid& g, const Vec& coeffs) {
  check_length(g, coeffs);
  const int N = g.N;
  Vec v = Vec::Zero(N + 1);
  for (int j = 0; j <= N; ++j) {
    double s = 0.0;
    for (int k = 0; k <= N; ++k) s += coeffs(k) * std::cos(pi * j * k / N);
    v(j) = s;
  }
  return v;
}

}  // namespace blowup
