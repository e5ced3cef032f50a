// Hierarchical orthonormal Dubiner bases on the reference tetrahedron and
// triangle, their derivatives, and the precomputed tables used by the
// element-matrix kernels. Evaluation goes through collapsed coordinates with
// homogenized Jacobi recurrences, so points on the degenerate edges/vertex
// are handled without division by vanishing factors.
//
// Ordering is hierarchical by total degree; inside a degree block the index
// tuples (i,j,m) (3D) and (i,j) (2D) are sorted lexicographically.

#ifndef HDG_BASIS_HPP
#define HDG_BASIS_HPP

#include <Eigen/Dense>
#include <array>

#include "hdg/quadrature.hpp"

namespace hdg {

inline int dim3(int k) { return (k + 1) * (k + 2) * (k + 3) / 6; }
inline int dim2(int k) { return (k + 1) * (k + 2) / 2; }

// Values of the d3(k) basis functions at points (rows of pts, Cartesian).
Eigen::MatrixXd eval_dubiner3d(int k, const Eigen::MatrixXd& pts);
void eval_dubiner3d_grad(int k, const Eigen::MatrixXd& pts, Eigen::MatrixXd& Px,
                         Eigen::MatrixXd& Py, Eigen::MatrixXd& Pz);
Eigen::MatrixXd eval_dubiner2d(int k, const Eigen::MatrixXd& pts);

// Images of points under the six affine self-maps of the reference triangle.
std::array<Eigen::MatrixXd, 6> face_maps(const Eigen::MatrixXd& pts);

struct BasisTables {
  int k = 0, d3 = 0, d2 = 0;
  Eigen::MatrixXd P;                   // Nnd x d3, values at volume points
  Eigen::MatrixXd Px, Py, Pz;          // Nnd x d3, reference derivatives
  std::array<Eigen::MatrixXd, 4> Pface;  // Nqd x d3, values at face images
  Eigen::MatrixXd D;                   // Nqd x d2, triangle basis at quad points
  std::array<Eigen::MatrixXd, 6> Dperm;  // Nqd x d2, D at F_mu(points)
};

BasisTables build_tables(int k, const TetRule& tet, const TriRule& tri);

}  // namespace hdg

#endif
