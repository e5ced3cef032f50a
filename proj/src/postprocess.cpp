#include "hdg/postprocess.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hdg {

namespace {

constexpr double kSqrt6 = 2.449489742783178;

// Values of the fields with coefficient matrix C (d x Nelt) at the volume
// quadrature points: P (Nnd x d) * C.
Eigen::MatrixXd field_values(const Eigen::MatrixXd& P, const Eigen::MatrixXd& C) {
  return P * C;
}

// Squared L2(Omega) norm of (F - P C) by the given rule: F sampled at the
// physical quadrature points (Nnd x Nelt).
double volume_error_sq(const ExpandedMesh& em, const TetRule& rule,
                       const Eigen::MatrixXd& P, const Eigen::MatrixXd& C,
                       const Eigen::ArrayXXd& F) {
  Eigen::ArrayXXd diff = F;
  if (C.size() > 0) diff -= field_values(P, C).array();
  const Eigen::VectorXd per_elt = rule.weights.transpose() * diff.square().matrix();
  return per_elt.dot(em.volume);
}

}  // namespace

Eigen::MatrixXd postprocess_star(const ExpandedMesh& em, const BasisTables& tb1,
                                 const TetRule& rule, const ScalarField& kappa,
                                 const LocalSolution& ls, int nthreads) {
  const int d31 = tb1.d3, nelt = em.n_elements();
  const int d3 = static_cast<int>(ls.u.rows());
  const Batch3 S = stiffness_matrices(em, tb1, rule);

  // right-hand side -(kinv q_h, grad w)_K, batched over quadrature nodes
  const PhysicalPoints pp = quad_points_physical(em, rule);
  const Eigen::ArrayXXd Kinv = kappa(pp.X.array(), pp.Y.array(), pp.Z.array()).inverse();
  const Eigen::MatrixXd a = piola_coefficients(em);
  const Eigen::MatrixXd Pk = tb1.P.leftCols(d3);  // hierarchical: degree-k head
  const Eigen::ArrayXXd Qs[3] = {(Pk * ls.qx).array() * Kinv,
                                 (Pk * ls.qy).array() * Kinv,
                                 (Pk * ls.qz).array() * Kinv};
  const Eigen::MatrixXd* Pd[3] = {&tb1.Px, &tb1.Py, &tb1.Pz};
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d31, nelt);
  for (int sharp = 0; sharp < 3; ++sharp) {
    Eigen::ArrayXXd G = Eigen::ArrayXXd::Zero(rule.size(), nelt);
    for (int star = 0; star < 3; ++star)
      G += Qs[star].rowwise() * a.col(3 * star + sharp).transpose().array();
    R.noalias() -= (1.0 / 6.0) * Pd[sharp]->transpose() *
                   (rule.weights.asDiagonal() * G.matrix());
  }

  Eigen::MatrixXd out(d31, nelt);
  parallel_for(nelt, nthreads, [&](int begin, int end) {
    Eigen::MatrixXd A(d31, d31);
    Eigen::VectorXd rhs(d31);
    for (int K = begin; K < end; ++K) {
      const double detB = 6.0 * em.volume(K);
      A = S.slice(K);
      rhs = R.col(K);
      // mean constraint replaces the (zero) constant-mode row
      A.row(0).setZero();
      A(0, 0) = detB / kSqrt6;
      rhs(0) = detB / kSqrt6 * ls.u(0, K);
      out.col(K) = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(rhs);
    }
  });
  return out;
}

Eigen::MatrixXd l2_project_volume(const ExpandedMesh& em, const BasisTables& tb,
                                  const TetRule& rule, const ScalarField& f) {
  const PhysicalPoints pp = quad_points_physical(em, rule);
  const Eigen::MatrixXd F = f(pp.X.array(), pp.Y.array(), pp.Z.array());
  // orthonormal basis: coefficients are plain moments, (1/6) sum w f P_i
  return (1.0 / 6.0) * tb.P.transpose() * (rule.weights.asDiagonal() * F);
}

Eigen::MatrixXd l2_project_skeleton(const ExpandedMesh& em, int k, const TriRule& tri,
                                    const ScalarField& f) {
  std::vector<int> all(em.n_faces());
  std::iota(all.begin(), all.end(), 0);
  Eigen::ArrayXXd X, Y, Z;
  face_quad_points(em, all, tri, X, Y, Z);
  const Eigen::MatrixXd F = f(X, Y, Z);
  const Eigen::MatrixXd D = eval_dubiner2d(k, tri.points());
  return 0.5 * D.transpose() * (tri.weights.asDiagonal() * F);
}

LocalSolution hdg_project(const ExpandedMesh& em, const ElementMatrixSet& ms,
                          const BasisTables& tb, const TetRule& tet,
                          const TriRule& tri, const StabilizationField& tau,
                          const VectorField& q, const ScalarField& u,
                          int nthreads) {
  const int d3 = tb.d3, d2 = tb.d2, nelt = em.n_elements();
  const int t = d3 - d2;  // retained interior moments per component
  const int n = 4 * d3;

  // volume data moments (q_*, P_m)_K and (u, P_m)_K
  const PhysicalPoints pp = quad_points_physical(em, tet);
  const Eigen::MatrixXd wP = tet.weights.asDiagonal() * tb.P;
  const Eigen::MatrixXd Vq[3] = {wP.transpose() * q.x(pp.X.array(), pp.Y.array(), pp.Z.array()).matrix(),
                                 wP.transpose() * q.y(pp.X.array(), pp.Y.array(), pp.Z.array()).matrix(),
                                 wP.transpose() * q.z(pp.X.array(), pp.Y.array(), pp.Z.array()).matrix()};
  const Eigen::MatrixXd Vu =
      wP.transpose() * u(pp.X.array(), pp.Y.array(), pp.Z.array()).matrix();

  // boundary data moments <q.nu + tau u, D_i>_e in each element's face order
  const Eigen::MatrixXd T = tau.scaled(em);
  Eigen::MatrixXd Bmom = Eigen::MatrixXd::Zero(4 * d2, nelt);
  for (int l = 0; l < 4; ++l) {
    const PhysicalPoints fp = face_points_physical(em, tri, l);
    const Eigen::ArrayXXd X = fp.X.array(), Y = fp.Y.array(), Z = fp.Z.array();
    // q . (area-scaled normal) absorbs the |e| of the surface measure
    Eigen::ArrayXXd g = q.x(X, Y, Z).rowwise() *
                        normal_weights(em, 0).col(l).transpose().array();
    g += q.y(X, Y, Z).rowwise() * normal_weights(em, 1).col(l).transpose().array();
    g += q.z(X, Y, Z).rowwise() * normal_weights(em, 2).col(l).transpose().array();
    g += u(X, Y, Z).rowwise() * T.col(l).transpose().array();
    for (int mu = 1; mu <= 6; ++mu) {
      Eigen::ArrayXXd gm = g;
      bool any = false;
      for (int K = 0; K < nelt; ++K) {
        if (em.perm(K, l) == mu)
          any = true;
        else
          gm.col(K).setZero();
      }
      if (!any) continue;
      Bmom.middleRows(l * d2, d2).noalias() +=
          tb.Dperm[mu - 1].transpose() * (tri.weights.asDiagonal() * gm.matrix());
    }
  }

  LocalSolution out;
  out.qx = Eigen::MatrixXd(d3, nelt);
  out.qy = Eigen::MatrixXd(d3, nelt);
  out.qz = Eigen::MatrixXd(d3, nelt);
  out.u = Eigen::MatrixXd(d3, nelt);

  std::atomic<int> bad{-1};
  parallel_for(nelt, nthreads, [&](int begin, int end) {
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd rhs(n);
    for (int K = begin; K < end; ++K) {
      const double vol = em.volume(K);
      A.setZero();
      // truncated mass rows: detB * identity on the leading coefficients
      for (int c = 0; c < 4; ++c)
        for (int m = 0; m < t; ++m) {
          A(c * t + m, c * d3 + m) = 6.0 * vol;
          rhs(c * t + m) =
              vol * (c == 0   ? Vq[0](m, K)
                     : c == 1 ? Vq[1](m, K)
                     : c == 2 ? Vq[2](m, K)
                              : Vu(m, K));
        }
      const Batch3* nDP[3] = {&ms.nxDP, &ms.nyDP, &ms.nzDP};
      for (int s = 0; s < 3; ++s)
        A.block(4 * t, s * d3, 4 * d2, d3) = nDP[s]->slice(K);
      A.block(4 * t, 3 * d3, 4 * d2, d3) = ms.tauDP.slice(K);
      rhs.segment(4 * t, 4 * d2) = Bmom.col(K);

      Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
      const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
      if (diag.maxCoeff() == 0.0 || diag.minCoeff() < 1e-14 * diag.maxCoeff()) {
        int expect = -1;
        bad.compare_exchange_strong(expect, K);
        return;
      }
      const Eigen::VectorXd sol = lu.solve(rhs);
      out.qx.col(K) = sol.segment(0, d3);
      out.qy.col(K) = sol.segment(d3, d3);
      out.qz.col(K) = sol.segment(2 * d3, d3);
      out.u.col(K) = sol.segment(3 * d3, d3);
    }
  });
  if (bad.load() >= 0)
    throw LocalSolverError(bad.load(), "singular projection system on element " +
                                           std::to_string(bad.load()));
  return out;
}

ErrorReport compute_errors(const ExpandedMesh& em, const ElementMatrixSet& ms,
                           const StabilizationField& tau, const ExactSolution& exact,
                           const DiscreteSolution& sol, int nthreads) {
  const int k = sol.k, d2 = dim2(k);
  const TetRule tet = tet_rule(2 * k + 4);
  const TriRule tri = tri_rule(2 * k + 4);
  const BasisTables tb = build_tables(k, tet, tri);

  const PhysicalPoints pp = quad_points_physical(em, tet);
  const Eigen::ArrayXXd X = pp.X.array(), Y = pp.Y.array(), Z = pp.Z.array();

  ErrorReport rep;
  // volume errors for q and u
  const double nq2 = volume_error_sq(em, tet, tb.P, {}, exact.q.x(X, Y, Z)) +
                     volume_error_sq(em, tet, tb.P, {}, exact.q.y(X, Y, Z)) +
                     volume_error_sq(em, tet, tb.P, {}, exact.q.z(X, Y, Z));
  const double eq2 = volume_error_sq(em, tet, tb.P, sol.fields.qx, exact.q.x(X, Y, Z)) +
                     volume_error_sq(em, tet, tb.P, sol.fields.qy, exact.q.y(X, Y, Z)) +
                     volume_error_sq(em, tet, tb.P, sol.fields.qz, exact.q.z(X, Y, Z));
  const double nu2 = volume_error_sq(em, tet, tb.P, {}, exact.u(X, Y, Z));
  const double eu2 = volume_error_sq(em, tet, tb.P, sol.fields.u, exact.u(X, Y, Z));
  // relative errors, falling back to absolute when the reference vanishes
  const auto rel = [](double err2, double norm2) {
    return std::sqrt(norm2 > 0 ? err2 / norm2 : err2);
  };
  rep.e_q = rel(eq2, nq2);
  rep.e_u = rel(eu2, nu2);

  // skeleton errors: ||v||_h^2 = sum_e |e| ||v||_{L2(e)}^2
  std::vector<int> all(em.n_faces());
  std::iota(all.begin(), all.end(), 0);
  Eigen::ArrayXXd Xf, Yf, Zf;
  face_quad_points(em, all, tri, Xf, Yf, Zf);
  const Eigen::ArrayXXd Uf = exact.u(Xf, Yf, Zf);
  const Eigen::MatrixXd D = eval_dubiner2d(k, tri.points());
  Eigen::MatrixXd byface(d2, em.n_faces());
  for (int f = 0; f < em.n_faces(); ++f)
    byface.col(f) = sol.uhat.segment(static_cast<Eigen::Index>(f) * d2, d2);
  const Eigen::ArrayXXd dskel = Uf - (D * byface).array();
  // int_e v^2 = |e| sum_r w_r v^2; the extra |e| is the skeleton weight
  const Eigen::ArrayXd area2 = em.area.array().square();
  const double nhat2 =
      ((tri.weights.transpose() * Uf.square().matrix()).transpose().array() * area2)
          .sum();
  const double ehat2 =
      ((tri.weights.transpose() * dskel.square().matrix()).transpose().array() * area2)
          .sum();
  rep.e_uhat = rel(ehat2, nhat2);

  // superconvergent quantities; with tau == 0 (BDM) the HDG projection
  // system is singular and the plain L2 projection is the natural reference
  Eigen::MatrixXd proj_u;
  if (tau.tau.cwiseAbs().maxCoeff() == 0.0) {
    proj_u = l2_project_volume(em, tb, tet, exact.u);
  } else {
    proj_u = hdg_project(em, ms, tb, tet, tri, tau, exact.q, exact.u, nthreads).u;
  }
  // orthonormality: ||sum dc P||_K^2 = detB |dc|^2
  const Eigen::ArrayXd du2 =
      (proj_u - sol.fields.u).array().square().colwise().sum();
  rep.eps_u = rel((du2 * 6.0 * em.volume.array()).sum(), nu2);

  const Eigen::MatrixXd Pu = l2_project_skeleton(em, k, tri, exact.u);
  const Eigen::ArrayXd dhat2 = (Pu - byface).array().square().colwise().sum();
  // per face: int_e (sum dc D)^2 = 2 |e| |dc|^2, then weighted by |e|
  rep.eps_uhat = rel((2.0 * dhat2 * area2).sum(), nhat2);

  if (sol.ustar.size() > 0) {
    const BasisTables tb1 = build_tables(k + 1, tet, tri);
    const double estar2 =
        volume_error_sq(em, tet, tb1.P, sol.ustar, exact.u(X, Y, Z));
    rep.e_star = rel(estar2, nu2);
  }
  return rep;
}

std::vector<double> rates(const std::vector<double>& errors_by_level) {
  for (double e : errors_by_level)
    if (!(e > 0)) throw std::invalid_argument("rates need positive errors");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors_by_level.size(); ++i)
    out.push_back(std::log2(errors_by_level[i] / errors_by_level[i + 1]));
  return out;
}

std::vector<double> p_ratios(const std::vector<double>& errors_by_degree) {
  for (double e : errors_by_degree)
    if (!(e > 0)) throw std::invalid_argument("p-ratios need positive errors");
  std::vector<double> out;
  for (std::size_t i = 0; i + 2 < errors_by_degree.size(); ++i)
    out.push_back(std::log(errors_by_degree[i] / errors_by_degree[i + 1]) /
                  std::log(errors_by_degree[i + 1] / errors_by_degree[i + 2]));
  return out;
}

}  // namespace hdg
