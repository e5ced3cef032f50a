#include "hdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hdg {

namespace {

constexpr int kMaxDegree = 60;

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^0 on [-1,1].
void gauss_jacobi_biunit(int n, int alpha, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::VectorXd diag(n), offdiag(std::max(0, n - 1));
  const double a = alpha;
  diag(0) = -a / (a + 2.0);
  for (int k = 1; k < n; ++k)
    diag(k) = -a * a / ((2.0 * k + a) * (2.0 * k + a + 2.0));
  for (int k = 1; k < n; ++k)
    offdiag(k - 1) = std::sqrt(4.0 * k * (k + a) * k * (k + a) /
                               ((2.0 * k + a) * (2.0 * k + a) *
                                (2.0 * k + a + 1.0) * (2.0 * k + a - 1.0)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag);
  x = es.eigenvalues();
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);  // int (1-x)^a dx
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    w(i) = mu0 * v0 * v0;
  }
}

}  // namespace

void gauss_jacobi01(int n, int alpha, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::VectorXd x, w;
  gauss_jacobi_biunit(n, alpha, x, w);
  nodes = (x.array() + 1.0) / 2.0;
  weights = w / std::pow(2.0, alpha + 1.0);
}

TetRule tet_rule(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw std::invalid_argument("tet_rule: unsupported degree");
  const int n = degree / 2 + 1;  // 2n-1 >= degree per direction
  Eigen::VectorXd ta, wa, tb, wb, tc, wc;
  gauss_jacobi01(n, 0, ta, wa);
  gauss_jacobi01(n, 1, tb, wb);
  gauss_jacobi01(n, 2, tc, wc);

  TetRule rule;
  rule.exactness = degree;
  rule.barycentric.resize(n * n * n, 4);
  rule.weights.resize(n * n * n);
  int q = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++q) {
        const double z = tc(k);
        const double y = tb(j) * (1.0 - z);
        const double x = ta(i) * (1.0 - tb(j)) * (1.0 - z);
        rule.barycentric.row(q) << 1.0 - x - y - z, x, y, z;
        rule.weights(q) = 6.0 * wa(i) * wb(j) * wc(k);
      }
  return rule;
}

TriRule tri_rule(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw std::invalid_argument("tri_rule: unsupported degree");
  const int n = degree / 2 + 1;
  Eigen::VectorXd ta, wa, tb, wb;
  gauss_jacobi01(n, 0, ta, wa);
  gauss_jacobi01(n, 1, tb, wb);

  TriRule rule;
  rule.exactness = degree;
  rule.barycentric.resize(n * n, 3);
  rule.weights.resize(n * n);
  int r = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i, ++r) {
      const double t = tb(j);
      const double s = ta(i) * (1.0 - t);
      rule.barycentric.row(r) << 1.0 - s - t, s, t;
      rule.weights(r) = 2.0 * wa(i) * wb(j);
    }
  return rule;
}

BoundaryPoints boundary_points(const TriRule& tri) {
  const int nq = tri.size();
  const Eigen::VectorXd s = tri.barycentric.col(1), t = tri.barycentric.col(2);
  BoundaryPoints bp;
  for (auto& m : bp.pts) m.resize(nq, 3);
  bp.pts[0] << s, t, Eigen::VectorXd::Zero(nq);
  bp.pts[1] << s, Eigen::VectorXd::Zero(nq), t;
  bp.pts[2] << Eigen::VectorXd::Zero(nq), s, t;
  bp.pts[3] << s, t, (1.0 - s.array() - t.array()).matrix();
  return bp;
}

}  // namespace hdg
