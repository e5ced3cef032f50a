#include "hdg/basis.hpp"

#include <cmath>
#include <vector>

namespace hdg {

namespace {

// Homogenized Jacobi recurrence for weight (1-x)^alpha: p_n(a,b) = b^n P_n^(alpha,0)(a/b),
// a polynomial in (a,b). Fills p[0..nmax]; pa/pb (optional) get the partials.
void jacobi_homog(int nmax, int alpha, double a, double b, double* p, double* pa,
                  double* pb) {
  const double al = alpha;
  p[0] = 1.0;
  if (pa) { pa[0] = 0.0; pb[0] = 0.0; }
  if (nmax == 0) return;
  p[1] = 0.5 * ((al + 2.0) * a + al * b);
  if (pa) { pa[1] = 0.5 * (al + 2.0); pb[1] = 0.5 * al; }
  for (int n = 2; n <= nmax; ++n) {
    const double c0 = 2.0 * n * (n + al) * (2.0 * n + al - 2.0);
    const double A = (2.0 * n + al - 1.0) * (2.0 * n + al) * (2.0 * n + al - 2.0);
    const double B = (2.0 * n + al - 1.0) * al * al;
    const double C = 2.0 * (n + al - 1.0) * (n - 1.0) * (2.0 * n + al);
    const double lin = A * a + B * b;
    p[n] = (lin * p[n - 1] - C * b * b * p[n - 2]) / c0;
    if (pa) {
      pa[n] = (A * p[n - 1] + lin * pa[n - 1] - C * b * b * pa[n - 2]) / c0;
      pb[n] = (B * p[n - 1] + lin * pb[n - 1] -
               C * (2.0 * b * p[n - 2] + b * b * pb[n - 2])) / c0;
    }
  }
}

struct Index3 { int i, j, m; };

std::vector<Index3> index_triples(int k) {
  std::vector<Index3> idx;
  idx.reserve(dim3(k));
  for (int d = 0; d <= k; ++d)
    for (int i = 0; i <= d; ++i)
      for (int j = 0; i + j <= d; ++j) idx.push_back({i, j, d - i - j});
  return idx;
}

double norm3(int i, int j, int m) {
  return std::sqrt(2.0 * (2 * i + 1) * (i + j + 1) * (2 * i + 2 * j + 2 * m + 3));
}

double norm2(int i, int j) { return std::sqrt(2.0 * (2 * i + 1) * (i + j + 1)); }

// Shared evaluation core; any of the output pointers may be null.
void eval3(int k, const Eigen::MatrixXd& pts, Eigen::MatrixXd* P, Eigen::MatrixXd* Px,
           Eigen::MatrixXd* Py, Eigen::MatrixXd* Pz) {
  const int n = static_cast<int>(pts.rows());
  const int d3 = dim3(k);
  const bool grad = Px != nullptr;
  if (P) P->resize(n, d3);
  if (grad) { Px->resize(n, d3); Py->resize(n, d3); Pz->resize(n, d3); }

  const auto idx = index_triples(k);
  std::vector<double> q(k + 1), qa(k + 1), qb(k + 1);
  // r and s tables per (i) and (i,j); sized k+1, recomputed as needed
  std::vector<std::vector<double>> r(k + 1, std::vector<double>(k + 1)),
      ra(k + 1, std::vector<double>(k + 1)), rb(k + 1, std::vector<double>(k + 1));
  std::vector<double> s(k + 1), sa(k + 1), sb(k + 1);

  for (int p = 0; p < n; ++p) {
    const double x = pts(p, 0), y = pts(p, 1), z = pts(p, 2);
    const double b1 = 1.0 - y - z, a1 = 2.0 * x - b1;
    const double b2 = 1.0 - z, a2 = 2.0 * y - b2;
    const double t3 = 2.0 * z - 1.0;

    jacobi_homog(k, 0, a1, b1, q.data(), grad ? qa.data() : nullptr,
                 grad ? qb.data() : nullptr);
    for (int i = 0; i <= k; ++i)
      jacobi_homog(k - i, 2 * i + 1, a2, b2, r[i].data(),
                   grad ? ra[i].data() : nullptr, grad ? rb[i].data() : nullptr);

    int prev_alpha = -1;
    for (int col = 0; col < d3; ++col) {
      const auto [i, j, m] = idx[col];
      const int alpha = 2 * i + 2 * j + 2;
      if (alpha != prev_alpha) {
        jacobi_homog(k - i - j, alpha, t3, 1.0, s.data(),
                     grad ? sa.data() : nullptr, grad ? sb.data() : nullptr);
        prev_alpha = alpha;
      }
      const double N = norm3(i, j, m);
      const double qi = q[i], rj = r[i][j], sm = s[m];
      if (P) (*P)(p, col) = N * qi * rj * sm;
      if (grad) {
        const double qd = qa[i] - qb[i];          // d/dy and d/dz of q
        const double rd = ra[i][j] - rb[i][j];    // d/dz of r
        (*Px)(p, col) = N * 2.0 * qa[i] * rj * sm;
        (*Py)(p, col) = N * (qd * rj + qi * 2.0 * ra[i][j]) * sm;
        (*Pz)(p, col) = N * (qd * rj * sm + qi * rd * sm + qi * rj * 2.0 * sa[m]);
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd eval_dubiner3d(int k, const Eigen::MatrixXd& pts) {
  Eigen::MatrixXd P;
  eval3(k, pts, &P, nullptr, nullptr, nullptr);
  return P;
}

void eval_dubiner3d_grad(int k, const Eigen::MatrixXd& pts, Eigen::MatrixXd& Px,
                         Eigen::MatrixXd& Py, Eigen::MatrixXd& Pz) {
  eval3(k, pts, nullptr, &Px, &Py, &Pz);
}

Eigen::MatrixXd eval_dubiner2d(int k, const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  const int d2 = dim2(k);
  Eigen::MatrixXd D(n, d2);
  std::vector<double> q(k + 1), s(k + 1);
  for (int p = 0; p < n; ++p) {
    const double sx = pts(p, 0), t = pts(p, 1);
    const double b = 1.0 - t, a = 2.0 * sx - b;
    jacobi_homog(k, 0, a, b, q.data(), nullptr, nullptr);
    int col = 0;
    for (int d = 0; d <= k; ++d)
      for (int i = 0; i <= d; ++i, ++col) {
        const int j = d - i;
        jacobi_homog(j, 2 * i + 1, 2.0 * t - 1.0, 1.0, s.data(), nullptr, nullptr);
        D(p, col) = norm2(i, j) * q[i] * s[j];
      }
  }
  return D;
}

std::array<Eigen::MatrixXd, 6> face_maps(const Eigen::MatrixXd& pts) {
  const Eigen::ArrayXd s = pts.col(0).array(), t = pts.col(1).array();
  const Eigen::ArrayXd u = 1.0 - s - t;
  const int n = static_cast<int>(pts.rows());
  std::array<Eigen::MatrixXd, 6> out;
  for (auto& m : out) m.resize(n, 2);
  out[0] << s, t;
  out[1] << t, s;
  out[2] << t, u;
  out[3] << s, u;
  out[4] << u, s;
  out[5] << u, t;
  return out;
}

BasisTables build_tables(int k, const TetRule& tet, const TriRule& tri) {
  BasisTables tb;
  tb.k = k;
  tb.d3 = dim3(k);
  tb.d2 = dim2(k);
  const Eigen::MatrixXd vol_pts = tet.points();
  eval3(k, vol_pts, &tb.P, &tb.Px, &tb.Py, &tb.Pz);
  const BoundaryPoints bp = boundary_points(tri);
  for (int l = 0; l < 4; ++l) tb.Pface[l] = eval_dubiner3d(k, bp.pts[l]);
  const Eigen::MatrixXd tri_pts = tri.points();
  tb.D = eval_dubiner2d(k, tri_pts);
  const auto mapped = face_maps(tri_pts);
  for (int mu = 0; mu < 6; ++mu) tb.Dperm[mu] = eval_dubiner2d(k, mapped[mu]);
  return tb;
}

}  // namespace hdg
