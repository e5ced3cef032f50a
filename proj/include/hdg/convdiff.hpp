// Convection bilinear forms assembled from the reaction-diffusion kernels:
// the volume form (beta . grad u, w)_K and the two surface pairings
// <(beta.nu) u, vhat>_dK and <(beta.nu) uhat, vhat>_dK. Only the validated
// matrices are exposed; no convection-diffusion solver is configured here.

#ifndef HDG_CONVDIFF_HPP
#define HDG_CONVDIFF_HPP

#include "hdg/element_matrices.hpp"

namespace hdg {

struct ConvectionBilinearSet {
  Batch3 vol;  // d3 x d3
  Batch3 dp;   // 4*d2 x d3
  Batch3 dd;   // 4*d2 x 4*d2, block diagonal
};

ConvectionBilinearSet convection_bilinear_matrices(const ExpandedMesh& em,
                                                   const BasisTables& tb,
                                                   const TetRule& tet,
                                                   const TriRule& tri,
                                                   const VectorField& beta);

}  // namespace hdg

#endif
