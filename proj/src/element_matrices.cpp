#include "hdg/element_matrices.hpp"

#include <stdexcept>

namespace hdg {

namespace {

Eigen::Map<Eigen::VectorXd> vec(Eigen::MatrixXd& m) {
  return {m.data(), m.size()};
}

// xi rows masked by permutation code: row K of result is
// xi(K,l) * 1{perm(K,l) == mu}.
Eigen::VectorXd masked_column(const ExpandedMesh& em, const Eigen::MatrixXd& xi,
                              int l, int mu) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(em.n_elements());
  for (int K = 0; K < em.n_elements(); ++K)
    if (em.perm(K, l) == mu) out(K) = xi(K, l);
  return out;
}

}  // namespace

StabilizationField StabilizationField::constant(const ExpandedMesh& em, double value) {
  StabilizationField s;
  s.tau = Eigen::MatrixXd::Constant(em.n_elements(), 4, value);
  return s;
}

Eigen::MatrixXd StabilizationField::scaled(const ExpandedMesh& em) const {
  Eigen::MatrixXd T(tau.rows(), 4);
  for (int K = 0; K < tau.rows(); ++K)
    for (int l = 0; l < 4; ++l) T(K, l) = tau(K, l) * em.area(em.facebyele(K, l));
  return T;
}

void StabilizationField::validate() const {
  if ((tau.array() < 0).any())
    throw std::invalid_argument("stabilization must be nonnegative");
  if (allow_zero) return;
  for (int K = 0; K < tau.rows(); ++K)
    if (tau.row(K).maxCoeff() <= 0)
      throw std::invalid_argument("stabilization vanishes identically on element " +
                                  std::to_string(K));
}

Eigen::MatrixXd piola_coefficients(const ExpandedMesh& em) {
  const int nelt = em.n_elements();
  Eigen::MatrixXd a(nelt, 9);
  for (int K = 0; K < nelt; ++K) {
    const ElementGeometry g = geometry(em.raw, K);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(K, 3 * r + c) = g.a(r, c);
  }
  return a;
}

Eigen::MatrixXd normal_weights(const ExpandedMesh& em, int star) {
  Eigen::MatrixXd n(em.n_elements(), 4);
  for (int K = 0; K < em.n_elements(); ++K)
    for (int l = 0; l < 4; ++l) n(K, l) = em.normals(K, 3 * l + star);
  return n;
}

PhysicalPoints quad_points_physical(const ExpandedMesh& em, const TetRule& rule) {
  Eigen::MatrixXd Xt, Yt, Zt;
  nodal_matrices(em, Xt, Yt, Zt);
  return {rule.barycentric * Xt, rule.barycentric * Yt, rule.barycentric * Zt};
}

PhysicalPoints face_points_physical(const ExpandedMesh& em, const TriRule& tri, int l) {
  // barycentric coordinates of the face image points w.r.t. the tetrahedron
  const BoundaryPoints bp = boundary_points(tri);
  const Eigen::MatrixXd& cart = bp.pts[l];
  Eigen::MatrixXd lambda(cart.rows(), 4);
  lambda.col(0) = 1.0 - cart.rowwise().sum().array();
  lambda.rightCols<3>() = cart;
  Eigen::MatrixXd Xt, Yt, Zt;
  nodal_matrices(em, Xt, Yt, Zt);
  return {lambda * Xt, lambda * Yt, lambda * Zt};
}

Eigen::MatrixXd source_vectors(const ExpandedMesh& em, const BasisTables& tb,
                               const TetRule& rule, const ScalarField& f) {
  const PhysicalPoints pp = quad_points_physical(em, rule);
  const Eigen::MatrixXd fvals = f(pp.X.array(), pp.Y.array(), pp.Z.array());
  Eigen::MatrixXd out =
      tb.P.transpose() * (rule.weights.asDiagonal() * fvals);
  out.array().rowwise() *= em.volume.transpose().array();
  return out;
}

Batch3 mass_matrices(const ExpandedMesh& em, const BasisTables& tb,
                     const TetRule& rule, const ScalarField& m) {
  const int d3 = tb.d3, nelt = em.n_elements();
  const PhysicalPoints pp = quad_points_physical(em, rule);
  Eigen::MatrixXd M = m(pp.X.array(), pp.Y.array(), pp.Z.array());
  M.array().rowwise() *= em.volume.transpose().array();

  Batch3 out(d3, d3, nelt);
  auto flat = out.flat();
  Eigen::MatrixXd W(d3, d3);
  for (int q = 0; q < rule.size(); ++q) {
    W.noalias() = rule.weights(q) * tb.P.row(q).transpose() * tb.P.row(q);
    flat.noalias() += vec(W) * M.row(q);
  }
  return out;
}

void convection_matrices(const ExpandedMesh& em, const BasisTables& tb,
                         const TetRule& rule, Batch3& Cx, Batch3& Cy, Batch3& Cz) {
  const int d3 = tb.d3, nelt = em.n_elements();
  const Eigen::MatrixXd a = piola_coefficients(em);
  const Eigen::MatrixXd wP = rule.weights.asDiagonal() * tb.P;
  std::array<Eigen::MatrixXd, 3> Chat;
  Chat[0] = (wP.transpose() * tb.Px) / 6.0;
  Chat[1] = (wP.transpose() * tb.Py) / 6.0;
  Chat[2] = (wP.transpose() * tb.Pz) / 6.0;

  Batch3* out[3] = {&Cx, &Cy, &Cz};
  for (int star = 0; star < 3; ++star) {
    *out[star] = Batch3(d3, d3, nelt);
    auto flat = out[star]->flat();
    for (int sharp = 0; sharp < 3; ++sharp)
      flat.noalias() += vec(Chat[sharp]) * a.col(3 * star + sharp).transpose();
  }
}

void variable_convection_matrices(const ExpandedMesh& em, const BasisTables& tb,
                                  const TetRule& rule, const ScalarField& m,
                                  Batch3& Cx, Batch3& Cy, Batch3& Cz) {
  const int d3 = tb.d3, nelt = em.n_elements();
  const Eigen::MatrixXd a = piola_coefficients(em);
  const PhysicalPoints pp = quad_points_physical(em, rule);
  const Eigen::MatrixXd M = m(pp.X.array(), pp.Y.array(), pp.Z.array());

  Batch3* out[3] = {&Cx, &Cy, &Cz};
  const Eigen::MatrixXd* Pd[3] = {&tb.Px, &tb.Py, &tb.Pz};
  for (int star = 0; star < 3; ++star) *out[star] = Batch3(d3, d3, nelt);
  Eigen::MatrixXd W(d3, d3);
  for (int q = 0; q < rule.size(); ++q) {
    for (int sharp = 0; sharp < 3; ++sharp) {
      W.noalias() =
          (rule.weights(q) / 6.0) * tb.P.row(q).transpose() * Pd[sharp]->row(q);
      for (int star = 0; star < 3; ++star) {
        const Eigen::RowVectorXd coef =
            M.row(q).cwiseProduct(a.col(3 * star + sharp).transpose());
        out[star]->flat().noalias() += vec(W) * coef;
      }
    }
  }
}

Batch3 type_a(const ExpandedMesh& em, const BasisTables& tb, const TriRule& tri,
              const Eigen::MatrixXd& xi) {
  const int d3 = tb.d3;
  Batch3 out(d3, d3, em.n_elements());
  auto flat = out.flat();
  Eigen::MatrixXd W(d3, d3);
  for (int l = 0; l < 4; ++l) {
    W.noalias() =
        tb.Pface[l].transpose() * tri.weights.asDiagonal() * tb.Pface[l];
    flat.noalias() += vec(W) * xi.col(l).transpose();
  }
  return out;
}

Batch3 type_b(const ExpandedMesh& em, const BasisTables& tb, const TriRule& tri,
              const Eigen::MatrixXd& xi) {
  const int d2 = tb.d2, nelt = em.n_elements();
  const Eigen::MatrixXd W = tb.D.transpose() * tri.weights.asDiagonal() * tb.D;
  Batch3 out(4 * d2, 4 * d2, nelt);
  for (int K = 0; K < nelt; ++K) {
    auto slice = out.slice(K);
    for (int l = 0; l < 4; ++l)
      slice.block(l * d2, l * d2, d2, d2) = xi(K, l) * W;
  }
  return out;
}

Batch3 type_c(const ExpandedMesh& em, const BasisTables& tb, const TriRule& tri,
              const Eigen::MatrixXd& xi) {
  const int d2 = tb.d2, d3 = tb.d3, nelt = em.n_elements();
  Batch3 out(4 * d2, d3, nelt);
  Batch3 block(d2, d3, nelt);
  Eigen::MatrixXd W(d2, d3);
  for (int l = 0; l < 4; ++l) {
    block.data.setZero();
    auto flat = block.flat();
    for (int mu = 1; mu <= 6; ++mu) {
      const Eigen::VectorXd coef = masked_column(em, xi, l, mu);
      if (coef.isZero(0)) continue;
      W.noalias() =
          tb.Dperm[mu - 1].transpose() * tri.weights.asDiagonal() * tb.Pface[l];
      flat.noalias() += vec(W) * coef.transpose();
    }
    for (int K = 0; K < nelt; ++K)
      out.slice(K).block(l * d2, 0, d2, d3) = block.slice(K);
  }
  return out;
}

Batch3 variable_surface_dp(const ExpandedMesh& em, const BasisTables& tb,
                           const TriRule& tri, const ScalarField& alpha,
                           const Eigen::MatrixXd& xi) {
  const int d2 = tb.d2, d3 = tb.d3, nelt = em.n_elements();
  Batch3 out(4 * d2, d3, nelt);
  Batch3 block(d2, d3, nelt);
  Eigen::MatrixXd W(d2, d3);
  for (int l = 0; l < 4; ++l) {
    const PhysicalPoints pp = face_points_physical(em, tri, l);
    const Eigen::MatrixXd A = alpha(pp.X.array(), pp.Y.array(), pp.Z.array());
    block.data.setZero();
    auto flat = block.flat();
    for (int mu = 1; mu <= 6; ++mu) {
      const Eigen::VectorXd coef = masked_column(em, xi, l, mu);
      if (coef.isZero(0)) continue;
      for (int r = 0; r < tri.size(); ++r) {
        W.noalias() = tri.weights(r) * tb.Dperm[mu - 1].row(r).transpose() *
                      tb.Pface[l].row(r);
        flat.noalias() += vec(W) * coef.cwiseProduct(A.row(r).transpose()).transpose();
      }
    }
    for (int K = 0; K < nelt; ++K)
      out.slice(K).block(l * d2, 0, d2, d3) = block.slice(K);
  }
  return out;
}

Batch3 variable_surface_dd(const ExpandedMesh& em, const BasisTables& tb,
                           const TriRule& tri, const ScalarField& alpha,
                           const Eigen::MatrixXd& xi) {
  const int d2 = tb.d2, nelt = em.n_elements();
  Batch3 out(4 * d2, 4 * d2, nelt);
  Batch3 block(d2, d2, nelt);
  Eigen::MatrixXd W(d2, d2);
  for (int l = 0; l < 4; ++l) {
    const PhysicalPoints pp = face_points_physical(em, tri, l);
    const Eigen::MatrixXd A = alpha(pp.X.array(), pp.Y.array(), pp.Z.array());
    block.data.setZero();
    auto flat = block.flat();
    for (int mu = 1; mu <= 6; ++mu) {
      const Eigen::VectorXd coef = masked_column(em, xi, l, mu);
      if (coef.isZero(0)) continue;
      for (int r = 0; r < tri.size(); ++r) {
        W.noalias() = tri.weights(r) * tb.Dperm[mu - 1].row(r).transpose() *
                      tb.Dperm[mu - 1].row(r);
        flat.noalias() += vec(W) * coef.cwiseProduct(A.row(r).transpose()).transpose();
      }
    }
    for (int K = 0; K < nelt; ++K)
      out.slice(K).block(l * d2, l * d2, d2, d2) = block.slice(K);
  }
  return out;
}

Batch3 stiffness_matrices(const ExpandedMesh& em, const BasisTables& tb,
                          const TetRule& rule) {
  const int d3 = tb.d3, nelt = em.n_elements();
  const Eigen::MatrixXd a = piola_coefficients(em);
  const Eigen::VectorXd detB = 6.0 * em.volume;
  const Eigen::MatrixXd* Pd[3] = {&tb.Px, &tb.Py, &tb.Pz};

  Batch3 out(d3, d3, nelt);
  auto flat = out.flat();
  Eigen::MatrixXd S(d3, d3);
  for (int sharp = 0; sharp < 3; ++sharp)
    for (int sharp2 = 0; sharp2 < 3; ++sharp2) {
      S.noalias() = (Pd[sharp]->transpose() * rule.weights.asDiagonal() *
                     (*Pd[sharp2])) / 6.0;
      // (a^T a)_{# #'} / detB per element
      Eigen::VectorXd g = Eigen::VectorXd::Zero(nelt);
      for (int star = 0; star < 3; ++star)
        g += a.col(3 * star + sharp).cwiseProduct(a.col(3 * star + sharp2));
      g = g.cwiseQuotient(detB);
      flat.noalias() += vec(S) * g.transpose();
    }
  return out;
}

ElementMatrixSet build_element_matrices(const ExpandedMesh& em, const BasisTables& tb,
                                        const TetRule& tet, const TriRule& tri,
                                        const ScalarField& kappa, const ScalarField& c,
                                        const ScalarField& f,
                                        const StabilizationField& tau) {
  tau.validate();
  ElementMatrixSet ms;
  ms.k = tb.k;
  ms.d3 = tb.d3;
  ms.d2 = tb.d2;
  const ScalarField kappa_inv = [&kappa](const Eigen::ArrayXXd& X,
                                         const Eigen::ArrayXXd& Y,
                                         const Eigen::ArrayXXd& Z) {
    return kappa(X, Y, Z).inverse().eval();
  };
  ms.Mkinv = mass_matrices(em, tb, tet, kappa_inv);
  ms.Mc = mass_matrices(em, tb, tet, c);
  convection_matrices(em, tb, tet, ms.Cx, ms.Cy, ms.Cz);
  const Eigen::MatrixXd T = tau.scaled(em);
  ms.tauPP = type_a(em, tb, tri, T);
  ms.tauDP = type_c(em, tb, tri, T);
  ms.nxDP = type_c(em, tb, tri, normal_weights(em, 0));
  ms.nyDP = type_c(em, tb, tri, normal_weights(em, 1));
  ms.nzDP = type_c(em, tb, tri, normal_weights(em, 2));
  ms.tauDD = type_b(em, tb, tri, T);
  ms.fvec = source_vectors(em, tb, tet, f);
  return ms;
}

}  // namespace hdg
