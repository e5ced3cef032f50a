// Batched per-element volume and surface matrices and source vectors. All
// kernels loop over quadrature nodes (rank-one updates of the flattened
// batch), never over elements for integrand evaluation; summation order over
// nodes is fixed, so results are deterministic.

#ifndef HDG_ELEMENT_MATRICES_HPP
#define HDG_ELEMENT_MATRICES_HPP

#include <Eigen/Dense>
#include <array>

#include "hdg/basis.hpp"
#include "hdg/batch.hpp"
#include "hdg/coefficient.hpp"
#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

// Per-element, per-local-face stabilization values tau >= 0, with each
// element carrying at least one positive face value.
struct StabilizationField {
  Eigen::MatrixXd tau;  // Nelt x 4
  bool allow_zero = false;  // the BDM variant runs with tau identically zero

  static StabilizationField constant(const ExpandedMesh& em, double value);
  // T(K,l) = tau(K,l) * |e_l^K|
  Eigen::MatrixXd scaled(const ExpandedMesh& em) const;
  void validate() const;
};

// Entries of detB * B^{-T} for all elements, by the cofactor formulas.
// Column order: a_xx a_xy a_xz a_yx a_yy a_yz a_zx a_zy a_zz.
Eigen::MatrixXd piola_coefficients(const ExpandedMesh& em);

// Component star (0=x,1=y,2=z) of the area-scaled outward normals, Nelt x 4.
Eigen::MatrixXd normal_weights(const ExpandedMesh& em, int star);

struct PhysicalPoints {
  Eigen::MatrixXd X, Y, Z;  // Nnd x Nelt
};

PhysicalPoints quad_points_physical(const ExpandedMesh& em, const TetRule& rule);
// Physical images of the triangle quadrature points on local face l of every
// element (through the element parametrization, Nqd x Nelt per component).
PhysicalPoints face_points_physical(const ExpandedMesh& em, const TriRule& tri, int l);

Eigen::MatrixXd source_vectors(const ExpandedMesh& em, const BasisTables& tb,
                               const TetRule& rule, const ScalarField& f);

Batch3 mass_matrices(const ExpandedMesh& em, const BasisTables& tb,
                     const TetRule& rule, const ScalarField& m);

void convection_matrices(const ExpandedMesh& em, const BasisTables& tb,
                         const TetRule& rule, Batch3& Cx, Batch3& Cy, Batch3& Cz);

void variable_convection_matrices(const ExpandedMesh& em, const BasisTables& tb,
                                  const TetRule& rule, const ScalarField& m,
                                  Batch3& Cx, Batch3& Cy, Batch3& Cz);

// Surface matrices; xi is an Nelt x 4 per-face weight (typically the scaled
// stabilization or a normal component).
Batch3 type_a(const ExpandedMesh& em, const BasisTables& tb, const TriRule& tri,
              const Eigen::MatrixXd& xi);
// Block-diagonal 4d2 x 4d2 batch with face blocks xi(K,l) * 2 * identity
// scaled by the surface Gram of the triangle basis.
Batch3 type_b(const ExpandedMesh& em, const BasisTables& tb, const TriRule& tri,
              const Eigen::MatrixXd& xi);
// 4d2 x d3 batch, face blocks stacked l = 1..4 top-down.
Batch3 type_c(const ExpandedMesh& em, const BasisTables& tb, const TriRule& tri,
              const Eigen::MatrixXd& xi);

// Variable-coefficient counterparts with alpha sampled at physical face points.
Batch3 variable_surface_dp(const ExpandedMesh& em, const BasisTables& tb,
                           const TriRule& tri, const ScalarField& alpha,
                           const Eigen::MatrixXd& xi);
Batch3 variable_surface_dd(const ExpandedMesh& em, const BasisTables& tb,
                           const TriRule& tri, const ScalarField& alpha,
                           const Eigen::MatrixXd& xi);

// Local stiffness batch (gradient-gradient), for the degree carried by tb.
Batch3 stiffness_matrices(const ExpandedMesh& em, const BasisTables& tb,
                          const TetRule& rule);

// Everything the local solvers need, built with consistent degree k.
struct ElementMatrixSet {
  int k = 0, d3 = 0, d2 = 0;
  Batch3 Mkinv, Mc, Cx, Cy, Cz;
  Batch3 tauPP;                       // d3 x d3
  Batch3 tauDP, nxDP, nyDP, nzDP;     // 4d2 x d3
  Batch3 tauDD;                       // 4d2 x 4d2, block diagonal
  Eigen::MatrixXd fvec;               // d3 x Nelt
};

ElementMatrixSet build_element_matrices(const ExpandedMesh& em, const BasisTables& tb,
                                        const TetRule& tet, const TriRule& tri,
                                        const ScalarField& kappa, const ScalarField& c,
                                        const ScalarField& f,
                                        const StabilizationField& tau);

}  // namespace hdg

#endif
