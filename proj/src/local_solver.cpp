#include "hdg/local_solver.hpp"

#include <atomic>
#include <string>

namespace hdg {

namespace {

// Assembles the blocks, keeping only the first nu scalar test/trial
// functions for the u unknown (nu == d3 recovers the plain scheme).
LocalBlocks assemble_blocks(const ElementMatrixSet& ms, int nu, bool with_tau) {
  const int d3 = ms.d3, d2 = ms.d2, nelt = ms.fvec.cols();
  LocalBlocks lb;
  lb.d3 = d3;
  lb.d2 = d2;
  lb.nu = nu;
  lb.n = 3 * d3 + nu;
  lb.A1 = Batch3(lb.n, lb.n, nelt);
  lb.A2 = Batch3(lb.n, 4 * d2, nelt);
  lb.A3 = Batch3(4 * d2, lb.n, nelt);
  lb.Af = Eigen::MatrixXd::Zero(lb.n, nelt);
  lb.tauDD = with_tau ? ms.tauDD : Batch3(4 * d2, 4 * d2, nelt);

  const Batch3* C[3] = {&ms.Cx, &ms.Cy, &ms.Cz};
  const Batch3* nDP[3] = {&ms.nxDP, &ms.nyDP, &ms.nzDP};
  for (int K = 0; K < nelt; ++K) {
    auto A1 = lb.A1.slice(K);
    auto A2 = lb.A2.slice(K);
    auto A3 = lb.A3.slice(K);
    for (int s = 0; s < 3; ++s) {
      A1.block(s * d3, s * d3, d3, d3) = ms.Mkinv.slice(K);
      A1.block(s * d3, 3 * d3, d3, nu) = -C[s]->slice(K).transpose().leftCols(nu);
      A1.block(3 * d3, s * d3, nu, d3) = C[s]->slice(K).topRows(nu);
      A2.block(s * d3, 0, d3, 4 * d2) = nDP[s]->slice(K).transpose();
      A3.block(0, s * d3, 4 * d2, d3) = nDP[s]->slice(K);
    }
    A1.block(3 * d3, 3 * d3, nu, nu) =
        ms.Mc.slice(K).topLeftCorner(nu, nu);
    if (with_tau) {
      A1.block(3 * d3, 3 * d3, nu, nu) += ms.tauPP.slice(K).topLeftCorner(nu, nu);
      A2.block(3 * d3, 0, nu, 4 * d2) = -ms.tauDP.slice(K).transpose().topRows(nu);
      A3.block(0, 3 * d3, 4 * d2, nu) = ms.tauDP.slice(K).leftCols(nu);
    }
    lb.Af.col(K).tail(nu) = ms.fvec.col(K).head(nu);
  }
  return lb;
}

Eigen::PartialPivLU<Eigen::MatrixXd> factor_checked(
    const Eigen::Map<const Eigen::MatrixXd>& A, int K) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.maxCoeff() == 0.0 || diag.minCoeff() < 1e-14 * diag.maxCoeff())
    throw LocalSolverError(K, "singular local system on element " + std::to_string(K));
  return lu;
}

}  // namespace

LocalBlocks local_blocks(const ElementMatrixSet& ms) {
  return assemble_blocks(ms, ms.d3, true);
}

LocalBlocks bdm_blocks(const ElementMatrixSet& ms) {
  if (ms.k < 1)
    throw std::invalid_argument("the BDM variant needs degree k >= 1");
  return assemble_blocks(ms, ms.d3 - ms.d2, false);
}

CondensedSystem condense(const LocalBlocks& lb, int nthreads) {
  const int nelt = lb.A1.count, m = 4 * lb.d2;
  CondensedSystem cs;
  cs.C = Batch3(m, m, nelt);
  cs.Cf = Eigen::MatrixXd(m, nelt);

  std::atomic<int> bad{-1};
  parallel_for(nelt, nthreads, [&](int begin, int end) {
    Eigen::MatrixXd rhs(lb.n, m + 1), sol;
    for (int K = begin; K < end; ++K) {
      try {
        const auto lu = factor_checked(lb.A1.slice(K), K);
        rhs.leftCols(m) = lb.A2.slice(K);
        rhs.col(m) = lb.Af.col(K);
        sol = lu.solve(rhs);
        cs.C.slice(K).noalias() = lb.A3.slice(K) * sol.leftCols(m);
        cs.C.slice(K) += lb.tauDD.slice(K);
        cs.Cf.col(K).noalias() = lb.A3.slice(K) * sol.col(m);
      } catch (const LocalSolverError&) {
        int expect = -1;
        bad.compare_exchange_strong(expect, K);
        return;
      }
    }
  });
  if (bad.load() >= 0)
    throw LocalSolverError(bad.load(), "singular local system on element " +
                                           std::to_string(bad.load()));
  return cs;
}

LocalSolution local_recover(const LocalBlocks& lb, const Eigen::MatrixXd& uhat,
                            int nthreads) {
  const int nelt = lb.A1.count, d3 = lb.d3;
  LocalSolution out;
  out.qx = Eigen::MatrixXd(d3, nelt);
  out.qy = Eigen::MatrixXd(d3, nelt);
  out.qz = Eigen::MatrixXd(d3, nelt);
  out.u = Eigen::MatrixXd::Zero(d3, nelt);

  std::atomic<int> bad{-1};
  parallel_for(nelt, nthreads, [&](int begin, int end) {
    Eigen::VectorXd rhs(lb.n), sol;
    for (int K = begin; K < end; ++K) {
      try {
        const auto lu = factor_checked(lb.A1.slice(K), K);
        rhs = lb.Af.col(K);
        rhs.noalias() -= lb.A2.slice(K) * uhat.col(K);
        sol = lu.solve(rhs);
        out.qx.col(K) = sol.segment(0, d3);
        out.qy.col(K) = sol.segment(d3, d3);
        out.qz.col(K) = sol.segment(2 * d3, d3);
        out.u.col(K).head(lb.nu) = sol.tail(lb.nu);
      } catch (const LocalSolverError&) {
        int expect = -1;
        bad.compare_exchange_strong(expect, K);
        return;
      }
    }
  });
  if (bad.load() >= 0)
    throw LocalSolverError(bad.load(), "singular local system on element " +
                                           std::to_string(bad.load()));
  return out;
}

}  // namespace hdg
