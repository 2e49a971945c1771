#pragma once

#include <Eigen/Dense>
#include <memory>

namespace blowup {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Chebyshev–Gauss–Lobatto collocation on [0,1]. Node j sits at
// (1 - cos(j*pi/N))/2, so rho(0) = 0 and rho(N) = 1.
struct Grid {
  int N = 0;
  Vec rho;
  Mat D;        // d/drho on node samples
  Vec w;        // Clenshaw–Curtis weights for the integral over [0,1]
  Vec bary;     // barycentric weights
  Vec fine;     // refinement points scanned by sup_norm
  Mat to_fine;  // interpolation matrix onto `fine`

  int size() const { return N + 1; }
};

using GridPtr = std::shared_ptr<const Grid>;

// refine: number of uniform refinement points per node interval (>= 4).
GridPtr make_grid(int N, int refine = 4);

Vec differentiate(const Grid& g, const Vec& values);

double interpolate(const Grid& g, const Vec& values, double x);

// Barycentric coefficients l_j(x) so that interpolate(x) = l . values.
Vec interpolation_row(const Grid& g, double x);

double sup_norm(const Grid& g, const Vec& values);

// Coefficients c_k of the interpolant in T_k(1 - 2 rho).
Vec chebyshev_coefficients(const Grid& g, const Vec& values);

// Inverse of chebyshev_coefficients.
Vec chebyshev_values(const Grid& g, const Vec& coeffs);

}  // namespace blowup
