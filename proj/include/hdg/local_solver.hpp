// Element-local systems for the mixed unknowns (q, u) coupled to the face
// trace uhat, their static condensation onto the trace, and the recovery of
// the interior unknowns once the trace is known.
//
// Per element the local system reads
//   A1 [q; u] + A2 uhat = Af,
// and the numerical-flux pairing against the face space is
//   A3 [q; u] - tauDD uhat,
// so that eliminating [q; u] leaves the condensed contribution
//   C = A3 A1^{-1} A2 + tauDD,   Cf = A3 A1^{-1} Af.

#ifndef HDG_LOCAL_SOLVER_HPP
#define HDG_LOCAL_SOLVER_HPP

#include <Eigen/Dense>

#include "hdg/batch.hpp"
#include "hdg/element_matrices.hpp"

namespace hdg {

struct LocalBlocks {
  int d3 = 0, d2 = 0;
  int nu = 0;   // retained u coefficients: d3, or d3 - d2 for the BDM variant
  int n = 0;    // 3*d3 + nu
  Batch3 A1;    // n x n
  Batch3 A2;    // n x 4*d2
  Batch3 A3;    // 4*d2 x n
  Eigen::MatrixXd Af;  // n x Nelt
  Batch3 tauDD;        // 4*d2 x 4*d2
};

LocalBlocks local_blocks(const ElementMatrixSet& ms);

// BDM-type variant: tau == 0, flux space unchanged, u reduced one degree by
// dropping the top-degree block of the scalar basis. Requires k >= 1.
LocalBlocks bdm_blocks(const ElementMatrixSet& ms);

struct CondensedSystem {
  Batch3 C;            // 4*d2 x 4*d2 per element
  Eigen::MatrixXd Cf;  // 4*d2 x Nelt
};

// Thrown when an element-local matrix is numerically singular.
struct LocalSolverError : std::runtime_error {
  int element;
  LocalSolverError(int K, const std::string& what)
      : std::runtime_error(what), element(K) {}
};

CondensedSystem condense(const LocalBlocks& lb, int nthreads = 1);

struct LocalSolution {
  Eigen::MatrixXd qx, qy, qz, u;  // d3 x Nelt; u zero-padded for the BDM variant
};

// Solves A1 [q; u] = Af - A2 uhat per element; uhat is 4*d2 x Nelt.
LocalSolution local_recover(const LocalBlocks& lb, const Eigen::MatrixXd& uhat,
                            int nthreads = 1);

}  // namespace hdg

#endif
