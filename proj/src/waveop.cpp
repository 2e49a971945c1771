#include "blowup/waveop.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/spaces.hpp"

namespace blowup {

Mat radial_laplacian(const Grid& g) {
  const int n = g.size();
  Mat Dm = g.D;
  Dm.row(0).setZero();
  Mat L = g.D * Dm;
  const Vec row0 = L.row(0).transpose();
  for (int i = 1; i < n; ++i) L.row(i) += (2.0 / g.rho(i)) * Dm.row(i);
  L.row(0) = 3.0 * row0.transpose();
  // Constants are annihilated exactly: each diagonal absorbs its row's rounding.
  for (int i = 0; i < n; ++i) L(i, i) -= L.row(i).sum();
  return L;
}

OperatorMatrix assemble(GridPtr g, OpMode mode) {
  const int n = g->size();
  Mat A = Mat::Zero(2 * n, 2 * n);
  const Mat transport = -(g->rho.asDiagonal() * g->D);
  A.topLeftCorner(n, n) = transport;
  A.topLeftCorner(n, n).diagonal().array() -= 0.5;
  A.topRightCorner(n, n) = Mat::Identity(n, n);
  A.bottomLeftCorner(n, n) = radial_laplacian(*g);
  if (mode == OpMode::full) A.bottomLeftCorner(n, n).diagonal().array() += 15.0 / 4.0;
  A.bottomRightCorner(n, n) = transport;
  A.bottomRightCorner(n, n).diagonal().array() -= 1.5;
  return OperatorMatrix{std::move(g), mode, std::move(A)};
}

std::vector<EigenPair> eigenpairs(const OperatorMatrix& op) {
  Eigen::EigenSolver<Mat> es(op.A, true);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::spectral_failure, "eigensolver did not converge for matrix of size " +
                                                  std::to_string(op.A.rows()));
  std::vector<EigenPair> out;
  out.reserve(op.A.rows());
  for (int k = 0; k < op.A.rows(); ++k) out.push_back({es.eigenvalues()(k), es.eigenvectors().col(k)});
  std::stable_sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

double Projection::amplitude(const State& s) const { return left.dot(s.stacked()); }

State Projection::apply(const State& s) const { return State::from_stacked(grid, amplitude(s) * g); }

State Projection::complement(const State& s) const {
  Vec v = s.stacked();
  v -= left.dot(v) * g;
  return State::from_stacked(grid, v);
}

Projection projection(const OperatorMatrix& op) {
  if (op.mode != OpMode::full) throw Error(ErrorKind::spectral_failure, "projection needs the full generator");
  const Grid& gr = *op.grid;
  const int n = gr.size();
  Projection P;
  P.grid = op.grid;
  P.g.resize(2 * n);
  P.g << Vec::Constant(n, 2.0), Vec::Constant(n, 3.0);

  const double right_res = (op.A * P.g - P.g).cwiseAbs().maxCoeff();
  if (right_res > 1e-6) throw Error(ErrorKind::spectral_failure, "eigenvalue 1 with eigenvector (2,3) not found");

  // Left eigenvector by shifted inverse iteration on A^T.
  const Mat M = h_gram(gr);
  const double shift = 1.0 + 1e-9;
  Eigen::PartialPivLU<Mat> lu(op.A.transpose() - shift * Mat::Identity(2 * n, 2 * n));
  Vec y = M * P.g;
  for (int it = 0; it < 4; ++it) {
    y = lu.solve(y);
    y /= y.norm();
  }
  const double yg = y.dot(P.g);
  if (std::abs(yg) < 1e-12) throw Error(ErrorKind::spectral_failure, "left eigenvector orthogonal to g");
  y /= yg;
  P.left = y;
  P.eigen_residual = (op.A.transpose() * y - y).cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff();
  if (P.eigen_residual > 1e-6) throw Error(ErrorKind::spectral_failure, "left eigenvector residual too large");

  // The quadrature weight rho^2 vanishes at the phi2 entry of rho = 0; that entry
  // borrows the weight of the first interior node so the Gram matrix is invertible.
  Mat Mreg = M;
  Mreg(n, n) += gr.w(1) * gr.rho(1) * gr.rho(1);
  P.g_star = Mreg.ldlt().solve(y);
  return P;
}

namespace {

double coefficient_tail(const Grid& g, const Eigen::VectorXcd& v) {
  const int n = g.size();
  const int cut = (2 * g.N) / 3;
  double top = 0.0, all = 0.0;
  for (int part = 0; part < 2; ++part) {
    const Eigen::VectorXcd seg = v.segment(part * n, n);
    for (const Vec& comp : {Vec(seg.real()), Vec(seg.imag())}) {
      const Vec c = chebyshev_coefficients(g, comp);
      for (int k = 0; k < n; ++k) {
        all = std::max(all, std::abs(c(k)));
        if (k > cut) top = std::max(top, std::abs(c(k)));
      }
    }
  }
  return all > 0.0 ? top / all : 0.0;
}

}  // namespace

SpuriousFilter::SpuriousFilter(const OperatorMatrix& op, double drift_tol, double tail_tol)
    : grid_(op.grid), drift_tol_(drift_tol), tail_tol_(tail_tol) {
  const OperatorMatrix fine = assemble(make_grid(2 * op.grid->N), op.mode);
  Eigen::EigenSolver<Mat> es(fine.A, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::spectral_failure, "refined eigensolve failed");
  refined_.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
}

FilterVerdict SpuriousFilter::check(std::complex<double> value, const Eigen::VectorXcd& vector) const {
  FilterVerdict v;
  v.drift = inf;
  for (const auto& mu : refined_) v.drift = std::min(v.drift, std::abs(mu - value));
  v.tail = coefficient_tail(*grid_, vector);
  v.accepted = v.drift < drift_tol_ && v.tail < tail_tol_;
  return v;
}

FilterVerdict SpuriousFilter::check(const EigenPair& pair) const { return check(pair.value, pair.vector); }

bool spurious_filter(const OperatorMatrix& op, const EigenPair& pair) {
  return SpuriousFilter(op).check(pair).accepted;
}

}  // namespace blowup
