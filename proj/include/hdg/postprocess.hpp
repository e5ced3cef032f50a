// Superconvergent element-local postprocessing, L2 and HDG projections, and
// the error/rate functionals used by the convergence studies.

#ifndef HDG_POSTPROCESS_HPP
#define HDG_POSTPROCESS_HPP

#include <Eigen/Dense>

#include "hdg/global_system.hpp"
#include "hdg/local_solver.hpp"

namespace hdg {

// Everything a solve produces: the skeleton trace, the recovered element
// fields, and (optionally) the postprocessed scalar.
struct DiscreteSolution {
  int k = 0;
  Eigen::VectorXd uhat;   // Nfc * d2
  LocalSolution fields;   // q_h, u_h coefficients, d3 x Nelt
  Eigen::MatrixXd ustar;  // d3(k+1) x Nelt, empty if not postprocessed
};

// Degree-(k+1) local Neumann problems (grad u*, grad w) = -(kinv q_h, grad w)
// with the element mean of u_h imposed in place of the constant mode.
// tb1 must carry degree k+1 tables built on `rule`.
Eigen::MatrixXd postprocess_star(const ExpandedMesh& em, const BasisTables& tb1,
                                 const TetRule& rule, const ScalarField& kappa,
                                 const LocalSolution& ls, int nthreads = 1);

// Elementwise L2 projection onto the degree carried by tb; with the
// orthonormal basis the Gram matrix is diagonal.
Eigen::MatrixXd l2_project_volume(const ExpandedMesh& em, const BasisTables& tb,
                                  const TetRule& rule, const ScalarField& f);

// Facewise L2 projection onto P_k of every face (d2 x Nfc), through each
// face's intrinsic parametrization.
Eigen::MatrixXd l2_project_skeleton(const ExpandedMesh& em, int k, const TriRule& tri,
                                    const ScalarField& f);

// HDG projection of a flux/scalar pair: interior moments against the
// truncated (degree k-1) basis plus the boundary flux moments
// <q.n + tau u, mu>_e; returns coefficients shaped like a LocalSolution.
LocalSolution hdg_project(const ExpandedMesh& em, const ElementMatrixSet& ms,
                          const BasisTables& tb, const TetRule& tet,
                          const TriRule& tri, const StabilizationField& tau,
                          const VectorField& q, const ScalarField& u,
                          int nthreads = 1);

struct ErrorReport {
  double e_q = 0, e_u = 0, e_uhat = 0;     // relative L2 / skeleton errors
  double eps_u = 0, eps_uhat = 0, e_star = 0;  // superconvergent quantities
};

// Exact data needed by the error functionals.
struct ExactSolution {
  ScalarField u;
  VectorField q;  // exact flux -kappa grad u
};

// Relative errors: L2(Omega) for q, u, u*; the |e|-weighted skeleton norm
// ||v||_h^2 = sum_e |e| ||v||_e^2 for the trace quantities. Quadrature is
// independent of the solver's rules (degree 2k+4).
ErrorReport compute_errors(const ExpandedMesh& em, const ElementMatrixSet& ms,
                           const StabilizationField& tau, const ExactSolution& exact,
                           const DiscreteSolution& sol, int nthreads = 1);

// Observed h-convergence rates log2(e_h / e_{h/2}); length L-1.
std::vector<double> rates(const std::vector<double>& errors_by_level);

// p-study ratios log(e_j/e_{j+1}) / log(e_{j+1}/e_{j+2}); length L-2.
std::vector<double> p_ratios(const std::vector<double>& errors_by_degree);

}  // namespace hdg

#endif
