// Assembly and solution of the condensed skeleton system. The trace unknown
// carries d2 coefficients per global face, numbered dof = face * d2 + i, so
// boundary faces (which come first in the face numbering) occupy a contiguous
// leading block. Dirichlet dofs are fixed to projected boundary data and the
// remaining block is solved with a sparse direct factorization.

#ifndef HDG_GLOBAL_SYSTEM_HPP
#define HDG_GLOBAL_SYSTEM_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hdg/coefficient.hpp"
#include "hdg/local_solver.hpp"
#include "hdg/mesh.hpp"

namespace hdg {

// Physical images of the triangle quadrature points on the listed global
// faces, through each face's intrinsic parametrization; arrays Nqd x faces.
void face_quad_points(const ExpandedMesh& em, const std::vector<int>& faces,
                      const TriRule& tri, Eigen::ArrayXXd& X, Eigen::ArrayXXd& Y,
                      Eigen::ArrayXXd& Z);

struct SkeletonSystem {
  Eigen::SparseMatrix<double> H;  // (Nfc*d2) x (Nfc*d2)
  Eigen::VectorXd b;
  int d2 = 0;
};

SkeletonSystem assemble(const ExpandedMesh& em, const CondensedSystem& cs);

// Face-wise L2 projection of g onto the Dirichlet faces; length Ndir * d2,
// ordered like the leading skeleton dofs.
Eigen::VectorXd dirichlet_project(const ExpandedMesh& em, int k, const TriRule& tri,
                                  const ScalarField& g);

// Loads <g . n, mu>_e on the Neumann faces (g the prescribed flux vector,
// n the outward unit normal); returned at full skeleton length, zero
// elsewhere. Subtract from the assembled right-hand side.
Eigen::VectorXd neumann_load(const ExpandedMesh& em, int k, const TriRule& tri,
                             const VectorField& g);

struct GlobalSolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixes the Dirichlet dofs to ubdry and solves the free block; returns the
// full skeleton coefficient vector. Uses a symmetric factorization when H is
// symmetric and sparse LU otherwise.
Eigen::VectorXd solve_skeleton(const ExpandedMesh& em, const SkeletonSystem& sys,
                               const Eigen::VectorXd& ubdry);

// Per-element stacked trace coefficients (4*d2 x Nelt) in local face order.
Eigen::MatrixXd gather_traces(const ExpandedMesh& em, int d2,
                              const Eigen::VectorXd& uhat);

}  // namespace hdg

#endif
