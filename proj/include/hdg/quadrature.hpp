// Quadrature on the reference tetrahedron and triangle, built as
// collapsed-coordinate tensor products of Gauss-Jacobi rules, plus the
// images of the triangle points on the four faces of the tetrahedron.
//
// Weight normalization follows the convention
//   int_{K3} f ~ (1/6) sum w_q f(p_q),   int_{K2} f ~ (1/2) sum w_r f(q_r),
// so that the weights of each rule sum to 1.

#ifndef HDG_QUADRATURE_HPP
#define HDG_QUADRATURE_HPP

#include <Eigen/Dense>
#include <array>

namespace hdg {

struct TetRule {
  Eigen::MatrixXd barycentric;  // Nnd x 4, rows sum to 1
  Eigen::VectorXd weights;      // Nnd, sums to 1
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
  // Cartesian points (x,y,z) = last three barycentric coordinates.
  Eigen::MatrixXd points() const { return barycentric.rightCols<3>(); }
};

struct TriRule {
  Eigen::MatrixXd barycentric;  // Nqd x 3
  Eigen::VectorXd weights;      // Nqd, sums to 1
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
  Eigen::MatrixXd points() const { return barycentric.rightCols<2>(); }
};

// Cartesian images of the triangle quadrature points on the four faces of
// the reference tetrahedron, in the fixed local face order.
struct BoundaryPoints {
  std::array<Eigen::MatrixXd, 4> pts;  // each Nqd x 3
};

TetRule tet_rule(int degree);
TriRule tri_rule(int degree);
BoundaryPoints boundary_points(const TriRule& tri);

// Gauss-Jacobi rule on [0,1] with weight (1-t)^alpha; n points, exact for
// polynomial degree 2n-1.
void gauss_jacobi01(int n, int alpha, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace hdg

#endif
