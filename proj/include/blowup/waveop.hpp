#pragma once

#include <complex>
#include <vector>

#include "blowup/simcoords.hpp"

namespace blowup {

enum class OpMode { free, full };

// Generator on stacked (phi1, phi2) node samples; size 2(N+1).
struct OperatorMatrix {
  GridPtr grid;
  OpMode mode = OpMode::full;
  Mat A;
};

// Discrete phi'' + (2/rho) phi'. Regularity phi'(0) = 0 is imposed on the
// derivative field before the second derivative and the 2/rho term are formed;
// at rho = 0 the 2/rho term becomes 2 phi''.
Mat radial_laplacian(const Grid& g);

OperatorMatrix assemble(GridPtr g, OpMode mode);

struct EigenPair {
  std::complex<double> value;
  Eigen::VectorXcd vector;
};

// Full eigendecomposition sorted by descending real part.
std::vector<EigenPair> eigenpairs(const OperatorMatrix& op);

// Rank-one Riesz projection onto g = (2,3).
struct Projection {
  GridPtr grid;
  Vec g;       // stacked constant (2,3)
  Vec left;    // dual functional: P f = (left . f) g, left . g = 1
  Vec g_star;  // representer of `left` in the quadrature H inner product
  double eigen_residual = 0.0;

  double amplitude(const State& s) const;
  State apply(const State& s) const;
  State complement(const State& s) const;  // (I - P) s
};

Projection projection(const OperatorMatrix& op);

struct FilterVerdict {
  bool accepted = false;
  double drift = 0.0;  // distance to the nearest eigenvalue at 2N
  double tail = 0.0;   // relative size of the top third of Chebyshev coefficients
};

// Refinement/coefficient-decay test for eigenpairs; the 2N spectrum is
// computed once at construction.
class SpuriousFilter {
 public:
  explicit SpuriousFilter(const OperatorMatrix& op, double drift_tol = 1e-4, double tail_tol = 1e-6);
  FilterVerdict check(const EigenPair& pair) const;
  FilterVerdict check(std::complex<double> value, const Eigen::VectorXcd& vector) const;

 private:
  GridPtr grid_;
  std::vector<std::complex<double>> refined_;
  double drift_tol_;
  double tail_tol_;
};

bool spurious_filter(const OperatorMatrix& op, const EigenPair& pair);

}  // namespace blowup
