#include "hdg/global_system.hpp"

#include <vector>

#include "hdg/basis.hpp"

namespace hdg {

void face_quad_points(const ExpandedMesh& em, const std::vector<int>& faces,
                      const TriRule& tri, Eigen::ArrayXXd& X, Eigen::ArrayXXd& Y,
                      Eigen::ArrayXXd& Z) {
  const int n = static_cast<int>(faces.size()), nq = tri.size();
  Eigen::MatrixXd W1(n, 3), W2(n, 3), W3(n, 3);
  for (int j = 0; j < n; ++j) {
    W1.row(j) = em.raw.coordinates.row(em.faces(faces[j], 0));
    W2.row(j) = em.raw.coordinates.row(em.faces(faces[j], 1));
    W3.row(j) = em.raw.coordinates.row(em.faces(faces[j], 2));
  }
  X.resize(nq, n);
  Y.resize(nq, n);
  Z.resize(nq, n);
  for (int r = 0; r < nq; ++r) {
    const double s = tri.barycentric(r, 1), t = tri.barycentric(r, 2);
    const Eigen::MatrixXd p = (1.0 - s - t) * W1 + s * W2 + t * W3;
    X.row(r) = p.col(0).transpose();
    Y.row(r) = p.col(1).transpose();
    Z.row(r) = p.col(2).transpose();
  }
}

SkeletonSystem assemble(const ExpandedMesh& em, const CondensedSystem& cs) {
  const int m = cs.C.rows, d2 = m / 4, nelt = em.n_elements();
  const Eigen::Index ndof = static_cast<Eigen::Index>(em.n_faces()) * d2;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nelt) * m * m);
  SkeletonSystem sys;
  sys.d2 = d2;
  sys.b = Eigen::VectorXd::Zero(ndof);
  for (int K = 0; K < nelt; ++K) {
    const auto C = cs.C.slice(K);
    for (int l1 = 0; l1 < 4; ++l1) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(em.facebyele(K, l1)) * d2;
      sys.b.segment(r0, d2) += cs.Cf.col(K).segment(l1 * d2, d2);
      for (int l2 = 0; l2 < 4; ++l2) {
        const Eigen::Index c0 = static_cast<Eigen::Index>(em.facebyele(K, l2)) * d2;
        for (int j = 0; j < d2; ++j)
          for (int i = 0; i < d2; ++i)
            trips.emplace_back(r0 + i, c0 + j, C(l1 * d2 + i, l2 * d2 + j));
      }
    }
  }
  sys.H.resize(ndof, ndof);
  sys.H.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

Eigen::VectorXd dirichlet_project(const ExpandedMesh& em, int k, const TriRule& tri,
                                  const ScalarField& g) {
  const int d2 = dim2(k), n = em.n_dirichlet();
  Eigen::ArrayXXd X, Y, Z;
  face_quad_points(em, em.dirfaces, tri, X, Y, Z);
  const Eigen::MatrixXd G = g(X, Y, Z);
  const Eigen::MatrixXd D = eval_dubiner2d(k, tri.points());
  // c_i = int_ref (g o phi) D_i = (1/2) sum_r w_r g D_i
  const Eigen::MatrixXd coef = 0.5 * D.transpose() * tri.weights.asDiagonal() * G;
  Eigen::VectorXd out(static_cast<Eigen::Index>(n) * d2);
  for (int j = 0; j < n; ++j) out.segment(static_cast<Eigen::Index>(j) * d2, d2) = coef.col(j);
  return out;
}

Eigen::VectorXd neumann_load(const ExpandedMesh& em, int k, const TriRule& tri,
                             const VectorField& g) {
  const int d2 = dim2(k), n = em.n_neumann();
  Eigen::VectorXd out =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(em.n_faces()) * d2);
  if (n == 0) return out;

  // adjacent (element, local face) of each boundary face, for the normal
  std::vector<int> adjK(em.n_faces(), -1), adjl(em.n_faces(), -1);
  for (int K = 0; K < em.n_elements(); ++K)
    for (int l = 0; l < 4; ++l) {
      const int f = em.facebyele(K, l);
      if (adjK[f] < 0) {
        adjK[f] = K;
        adjl[f] = l;
      }
    }

  Eigen::ArrayXXd X, Y, Z;
  face_quad_points(em, em.neufaces, tri, X, Y, Z);
  const Eigen::ArrayXXd Gx = g.x(X, Y, Z), Gy = g.y(X, Y, Z), Gz = g.z(X, Y, Z);
  const Eigen::MatrixXd D = eval_dubiner2d(k, tri.points());
  for (int j = 0; j < n; ++j) {
    const int f = em.neufaces[j];
    const Eigen::Vector3d nvec = em.normal(adjK[f], adjl[f]);  // |nvec| = |e|
    const Eigen::ArrayXd gn =
        Gx.col(j) * nvec.x() + Gy.col(j) * nvec.y() + Gz.col(j) * nvec.z();
    // int_e (g.n) D_i = |e| sum_r w_r (g.n_unit) D_i; |e| already in nvec
    out.segment(static_cast<Eigen::Index>(f) * d2, d2) =
        D.transpose() * (tri.weights.array() * gn).matrix();
  }
  return out;
}

Eigen::VectorXd solve_skeleton(const ExpandedMesh& em, const SkeletonSystem& sys,
                               const Eigen::VectorXd& ubdry) {
  const int d2 = sys.d2;
  const Eigen::Index ndof = sys.H.rows();
  std::vector<Eigen::Index> where(ndof, -1);  // fixed: -2-j, free: free index
  Eigen::VectorXd uhat = Eigen::VectorXd::Zero(ndof);
  for (std::size_t j = 0; j < em.dirfaces.size(); ++j)
    for (int i = 0; i < d2; ++i) {
      const Eigen::Index dof = static_cast<Eigen::Index>(em.dirfaces[j]) * d2 + i;
      where[dof] = -2;
      uhat(dof) = ubdry(static_cast<Eigen::Index>(j) * d2 + i);
    }
  Eigen::Index nfree = 0;
  std::vector<Eigen::Index> freedofs;
  freedofs.reserve(ndof);
  for (Eigen::Index dof = 0; dof < ndof; ++dof)
    if (where[dof] == -1) {
      where[dof] = nfree++;
      freedofs.push_back(dof);
    }

  Eigen::VectorXd rhs(nfree);
  for (Eigen::Index r = 0; r < nfree; ++r) rhs(r) = sys.b(freedofs[r]);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sys.H.nonZeros());
  for (int c = 0; c < sys.H.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.H, c); it; ++it) {
      const Eigen::Index rw = where[it.row()], cw = where[it.col()];
      if (rw < 0) continue;
      if (cw >= 0)
        trips.emplace_back(rw, cw, it.value());
      else
        rhs(rw) -= it.value() * uhat(it.col());
    }
  Eigen::SparseMatrix<double> Hff(nfree, nfree);
  Hff.setFromTriplets(trips.begin(), trips.end());

  const Eigen::SparseMatrix<double> diff =
      Eigen::SparseMatrix<double>(Hff.transpose()) - Hff;
  const double asym = diff.coeffs().cwiseAbs().sum();
  const double scale = Hff.coeffs().cwiseAbs().sum();
  Eigen::VectorXd x(nfree);
  if (scale == 0.0 || asym < 1e-12 * scale) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(Hff);
    if (chol.info() != Eigen::Success)
      throw GlobalSolverError("symmetric factorization of the condensed system failed");
    x = chol.solve(rhs);
    if (chol.info() != Eigen::Success)
      throw GlobalSolverError("symmetric solve of the condensed system failed");
  } else {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Hff);
    if (lu.info() != Eigen::Success)
      throw GlobalSolverError("sparse LU factorization of the condensed system failed");
    x = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
      throw GlobalSolverError("sparse LU solve of the condensed system failed");
  }
  for (Eigen::Index r = 0; r < nfree; ++r) uhat(freedofs[r]) = x(r);
  return uhat;
}

Eigen::MatrixXd gather_traces(const ExpandedMesh& em, int d2,
                              const Eigen::VectorXd& uhat) {
  Eigen::MatrixXd out(4 * d2, em.n_elements());
  for (int K = 0; K < em.n_elements(); ++K)
    for (int l = 0; l < 4; ++l)
      out.col(K).segment(l * d2, d2) =
          uhat.segment(static_cast<Eigen::Index>(em.facebyele(K, l)) * d2, d2);
  return out;
}

}  // namespace hdg
