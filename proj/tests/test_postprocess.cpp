#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hdg/postprocess.hpp"
#include "oracles.hpp"

using namespace hdg;
using namespace hdg::testing;

namespace {

ExpandedMesh mesh2() { return expand(box_mesh(2, 2, 2, {}, dirichlet_top_bottom())); }

ScalarField wrap(std::function<double(const Eigen::Vector3d&)> f) {
  return pointwise_field([f = std::move(f)](double x, double y, double z) {
    return f(Eigen::Vector3d(x, y, z));
  });
}

// L2 norm of (exact - coefficients) over the mesh by high-order quadrature.
double field_error(const ExpandedMesh& em, int k, const Eigen::MatrixXd& C,
                   const std::function<double(const Eigen::Vector3d&)>& exact) {
  const TetRule rule = tet_rule(20);
  const Eigen::MatrixXd P = eval_dubiner3d(k, rule.points());
  double sum = 0;
  for (int K = 0; K < em.n_elements(); ++K) {
    const Eigen::MatrixXd pts = map_to_element(em.raw, K, rule.points());
    for (int q = 0; q < rule.size(); ++q) {
      const double d = exact(pts.row(q).transpose()) - P.row(q).dot(C.col(K));
      sum += em.volume(K) * rule.weights(q) * d * d;
    }
  }
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("postprocess_star") {
  const int k = 1;
  const ExpandedMesh em = mesh2();
  const TetRule rule = tet_rule(2 * (k + 1) + 2);
  const BasisTables tb1 = build_tables(k + 1, rule, tri_rule(2 * k + 2));

  SUBCASE("reproduces degree k+1 polynomials from exact projected data") {
    const double kap = 2.0;
    const auto u = [](const Eigen::Vector3d& p) {
      return 1.0 + p.x() * p.x() - p.y() * p.z() + 2.0 * p.z() * p.z() - p.x();
    };
    LocalSolution ls;
    ls.qx = project_volume(em, k, [&](const Eigen::Vector3d& p) {
      return -kap * (2.0 * p.x() - 1.0);
    });
    ls.qy = project_volume(em, k, [&](const Eigen::Vector3d& p) { return kap * p.z(); });
    ls.qz = project_volume(em, k, [&](const Eigen::Vector3d& p) {
      return -kap * (-p.y() + 4.0 * p.z());
    });
    ls.u = project_volume(em, k, u);
    const Eigen::MatrixXd ustar =
        postprocess_star(em, tb1, rule, constant_field(kap), ls);
    const Eigen::MatrixXd expect = project_volume(em, k + 1, u);
    CHECK((ustar - expect).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("q = 0, u constant stays constant") {
    LocalSolution ls;
    ls.qx = Eigen::MatrixXd::Zero(dim3(k), em.n_elements());
    ls.qy = ls.qx;
    ls.qz = ls.qx;
    ls.u = project_volume(em, k, [](const Eigen::Vector3d&) { return 4.5; });
    const Eigen::MatrixXd ustar =
        postprocess_star(em, tb1, rule, constant_field(1.0), ls);
    const Eigen::MatrixXd expect =
        project_volume(em, k + 1, [](const Eigen::Vector3d&) { return 4.5; });
    CHECK((ustar - expect).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("mean preservation and Galerkin orthogonality for arbitrary data") {
    const auto kfun = [](double x, double y, double z) {
      return 2.0 + std::sin(x) * std::sin(y) * std::sin(z);
    };
    std::mt19937 gen(11);
    std::normal_distribution<double> dist;
    LocalSolution ls;
    ls.qx = Eigen::MatrixXd::NullaryExpr(dim3(k), em.n_elements(),
                                         [&]() { return dist(gen); });
    ls.qy = Eigen::MatrixXd::NullaryExpr(dim3(k), em.n_elements(),
                                         [&]() { return dist(gen); });
    ls.qz = Eigen::MatrixXd::NullaryExpr(dim3(k), em.n_elements(),
                                         [&]() { return dist(gen); });
    ls.u = Eigen::MatrixXd::NullaryExpr(dim3(k), em.n_elements(),
                                        [&]() { return dist(gen); });
    const TetRule hi = tet_rule(20);  // kappa varies: kernel and check share it
    const BasisTables tb1h = build_tables(k + 1, hi, tri_rule(2 * k + 2));
    const Eigen::MatrixXd ustar =
        postprocess_star(em, tb1h, hi, pointwise_field(kfun), ls);

    // mean: the constant coefficient of u* equals that of u_h
    CHECK((ustar.row(0) - ls.u.row(0)).cwiseAbs().maxCoeff() < 1e-12);

    // orthogonality: int_K (grad u* + kinv q_h) . grad P_i = 0, i > 0
    const Eigen::MatrixXd P = eval_dubiner3d(k, hi.points());
    Eigen::MatrixXd Gx, Gy, Gz;
    eval_dubiner3d_grad(k + 1, hi.points(), Gx, Gy, Gz);
    for (int K = 0; K < em.n_elements(); K += 11) {
      const ElementGeometry g = geometry(em.raw, K);
      const Eigen::Matrix3d Bit = g.B.inverse().transpose();
      const Eigen::MatrixXd pts = map_to_element(em.raw, K, hi.points());
      Eigen::VectorXd resid = Eigen::VectorXd::Zero(dim3(k + 1));
      for (int q = 0; q < hi.size(); ++q) {
        const double kinv = 1.0 / kfun(pts(q, 0), pts(q, 1), pts(q, 2));
        // physical gradient of u* and values of q_h at the node
        Eigen::Vector3d gs = Eigen::Vector3d::Zero();
        const Eigen::Vector3d gref(Gx.row(q).dot(ustar.col(K)),
                                   Gy.row(q).dot(ustar.col(K)),
                                   Gz.row(q).dot(ustar.col(K)));
        gs = Bit * gref;
        gs.x() += kinv * P.row(q).dot(ls.qx.col(K));
        gs.y() += kinv * P.row(q).dot(ls.qy.col(K));
        gs.z() += kinv * P.row(q).dot(ls.qz.col(K));
        for (int i = 0; i < dim3(k + 1); ++i) {
          const Eigen::Vector3d gi =
              Bit * Eigen::Vector3d(Gx(q, i), Gy(q, i), Gz(q, i));
          resid(i) += em.volume(K) * hi.weights(q) * gs.dot(gi);
        }
      }
      CHECK(resid.tail(dim3(k + 1) - 1).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("l2_project_volume") {
  const int k = 2;
  const ExpandedMesh em = mesh2();
  const TetRule rule = tet_rule(2 * k + 2);
  const BasisTables tb = build_tables(k, rule, tri_rule(2 * k + 2));

  SUBCASE("idempotent on members of the space") {
    const auto f = [](const Eigen::Vector3d& p) {
      return 1.0 - p.x() * p.y() + p.z() * p.z();
    };
    const Eigen::MatrixXd proj = l2_project_volume(em, tb, rule, wrap(f));
    CHECK((proj - project_volume(em, k, f)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("constant hits only the first coefficient") {
    const Eigen::MatrixXd proj = l2_project_volume(em, tb, rule, constant_field(3.0));
    CHECK(proj.bottomRows(dim3(k) - 1).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((proj.row(0).array() - 3.0 / std::sqrt(6.0)).abs().maxCoeff() < 1e-13);
  }
  SUBCASE("refinement rate is k+1 for a smooth function") {
    const auto f = [](const Eigen::Vector3d& p) {
      return std::sin(p.x() * p.y() * p.z());
    };
    double err[2];
    int n = 2;
    for (int lev = 0; lev < 2; ++lev, n *= 2) {
      const ExpandedMesh m = expand(box_mesh(n, n, n, {}, all_dirichlet()));
      const Eigen::MatrixXd proj = l2_project_volume(m, tb, rule, wrap(f));
      err[lev] = field_error(m, k, proj, f);
    }
    const double rate = std::log2(err[0] / err[1]);
    CHECK(rate > k + 0.7);
    CHECK(rate < k + 1.3);
  }
}

TEST_CASE("l2_project_skeleton") {
  const int k = 2;
  const ExpandedMesh em = mesh2();
  const TriRule tri = tri_rule(2 * k + 2);

  SUBCASE("agrees with dirichlet_project on Dirichlet faces") {
    const ScalarField g = pointwise_field(
        [](double x, double y, double z) { return std::cos(x + y) + z; });
    const Eigen::MatrixXd skel = l2_project_skeleton(em, k, tri, g);
    const Eigen::VectorXd dir = dirichlet_project(em, k, tri, g);
    const int d2 = dim2(k);
    for (int j = 0; j < em.n_dirichlet(); ++j)
      CHECK((skel.col(em.dirfaces[j]) - dir.segment(j * d2, d2)).cwiseAbs().maxCoeff()
            < 1e-13);
  }
  SUBCASE("polynomial trace reproduction off the quadrature points") {
    const auto f = [](const Eigen::Vector3d& p) {
      return p.x() * p.x() - p.y() * p.z() + 2.0;
    };
    const Eigen::MatrixXd skel = l2_project_skeleton(em, k, tri, wrap(f));
    // evaluate with a different rule's points and compare pointwise
    const TriRule probe = tri_rule(11);
    const Eigen::MatrixXd D = eval_dubiner2d(k, probe.points());
    for (int fc = 0; fc < em.n_faces(); fc += 7) {
      const Eigen::Vector3d w1 = em.raw.coordinates.row(em.faces(fc, 0));
      const Eigen::Vector3d w2 = em.raw.coordinates.row(em.faces(fc, 1));
      const Eigen::Vector3d w3 = em.raw.coordinates.row(em.faces(fc, 2));
      for (int r = 0; r < probe.size(); ++r) {
        const double s = probe.barycentric(r, 1), t = probe.barycentric(r, 2);
        const double exact = f(w1 + s * (w2 - w1) + t * (w3 - w1));
        CHECK(D.row(r).dot(skel.col(fc)) == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }
  SUBCASE("zero input gives zeros") {
    CHECK(l2_project_skeleton(em, k, tri, constant_field(0.0)).cwiseAbs().maxCoeff()
          == 0.0);
  }
}

TEST_CASE("hdg_project") {
  const ExpandedMesh em = mesh2();

  SUBCASE("identity on discrete pairs") {
    const int k = 2;
    const TetRule tet = tet_rule(2 * k + 4);
    const TriRule tri = tri_rule(2 * k + 4);
    const BasisTables tb = build_tables(k, tet, tri);
    const StabilizationField tau = StabilizationField::constant(em, 1.0);
    const ElementMatrixSet ms = build_element_matrices(
        em, tb, tet, tri, constant_field(1.0), constant_field(1.0),
        constant_field(0.0), tau);
    const auto u = [](const Eigen::Vector3d& p) { return p.x() * p.y() - p.z(); };
    const VectorField q{
        pointwise_field([](double x, double, double z) { return x * x - z; }),
        pointwise_field([](double, double y, double) { return 1.0 - y; }),
        pointwise_field([](double x, double y, double) { return x + y * y; })};
    const LocalSolution proj = hdg_project(em, ms, tb, tet, tri, tau, q, wrap(u));
    CHECK((proj.u - project_volume(em, k, u)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((proj.qx - project_volume(em, k, [](const Eigen::Vector3d& p) {
             return p.x() * p.x() - p.z();
           })).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((proj.qz - project_volume(em, k, [](const Eigen::Vector3d& p) {
             return p.x() + p.y() * p.y();
           })).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("moment conditions for smooth data, k = 0 and k = 2") {
    for (int k : {0, 2}) {
      const TetRule tet = tet_rule(20);
      const TriRule tri = tri_rule(20);
      const BasisTables tb = build_tables(k, tet, tri);
      const StabilizationField tau = StabilizationField::constant(em, 1.5);
      const ElementMatrixSet ms = build_element_matrices(
          em, tb, tet, tri, constant_field(1.0), constant_field(1.0),
          constant_field(0.0), tau);
      const auto u = [](const Eigen::Vector3d& p) {
        return std::sin(p.x()) * std::cos(p.y()) + p.z();
      };
      const VectorField q{
          pointwise_field([](double x, double y, double) { return std::cos(x * y); }),
          pointwise_field([](double, double y, double z) { return y + std::sin(z); }),
          pointwise_field([](double x, double, double z) { return std::exp(-x - z); })};
      const LocalSolution proj = hdg_project(em, ms, tb, tet, tri, tau, q, wrap(u));

      // interior moments against the truncated basis
      const int t = dim3(k) - dim2(k);
      if (t > 0) {
        const Eigen::MatrixXd qxm = project_volume(em, k, [&](const Eigen::Vector3d& p) {
          return std::cos(p.x() * p.y());
        });
        const Eigen::MatrixXd um = project_volume(em, k, u);
        CHECK((proj.qx.topRows(t) - qxm.topRows(t)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((proj.u.topRows(t) - um.topRows(t)).cwiseAbs().maxCoeff() < 1e-10);
      }

      // boundary moments <q.n + tau u, mu>_e via the (exact) surface blocks
      for (int K = 0; K < em.n_elements(); K += 13) {
        const Eigen::VectorXd lhs = ms.nxDP.slice(K) * proj.qx.col(K) +
                                    ms.nyDP.slice(K) * proj.qy.col(K) +
                                    ms.nzDP.slice(K) * proj.qz.col(K) +
                                    ms.tauDP.slice(K) * proj.u.col(K);
        // data side: independent high-order quadrature per face
        const int d2 = dim2(k);
        const Eigen::MatrixXd D1 = eval_dubiner2d(k, tri.points());
        for (int l = 0; l < 4; ++l) {
          const int fidx = em.facebyele(K, l);
          const Eigen::Vector3d n = em.normal(K, l) / em.area(fidx);
          const Eigen::Vector3d w1 = em.raw.coordinates.row(em.faces(fidx, 0));
          const Eigen::Vector3d w2 = em.raw.coordinates.row(em.faces(fidx, 1));
          const Eigen::Vector3d w3 = em.raw.coordinates.row(em.faces(fidx, 2));
          for (int i = 0; i < d2; ++i) {
            double expect = 0;
            for (int r = 0; r < tri.size(); ++r) {
              const double s = tri.barycentric(r, 1), tt = tri.barycentric(r, 2);
              const Eigen::Vector3d p = w1 + s * (w2 - w1) + tt * (w3 - w1);
              const double qn = std::cos(p.x() * p.y()) * n.x() +
                                (p.y() + std::sin(p.z())) * n.y() +
                                std::exp(-p.x() - p.z()) * n.z();
              expect += tri.weights(r) * (qn + 1.5 * u(p)) * D1(r, i);
            }
            expect *= em.area(fidx);
            CHECK(lhs(l * d2 + i) == doctest::Approx(expect).epsilon(1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("compute_errors vanishes on exact discrete data") {
  const int k = 1;
  const ExpandedMesh em = mesh2();
  const TetRule tet = tet_rule(2 * k + 2);
  const TriRule tri = tri_rule(2 * k + 2);
  const BasisTables tb = build_tables(k, tet, tri);
  const StabilizationField tau = StabilizationField::constant(em, 1.0);
  const auto u = [](const Eigen::Vector3d& p) {
    return 1.0 + p.x() - 0.5 * p.y() + 2.0 * p.z();
  };
  const VectorField q{constant_field(-2.0), constant_field(1.0), constant_field(-4.0)};
  const ElementMatrixSet ms = build_element_matrices(
      em, tb, tet, tri, constant_field(2.0), constant_field(1.0),
      wrap(u), tau);

  DiscreteSolution sol;
  sol.k = k;
  sol.fields.qx = project_volume(em, k, [](const Eigen::Vector3d&) { return -2.0; });
  sol.fields.qy = project_volume(em, k, [](const Eigen::Vector3d&) { return 1.0; });
  sol.fields.qz = project_volume(em, k, [](const Eigen::Vector3d&) { return -4.0; });
  sol.fields.u = project_volume(em, k, u);
  const Eigen::MatrixXd byface = project_faces(em, k, u);
  sol.uhat.resize(em.n_faces() * dim2(k));
  for (int f = 0; f < em.n_faces(); ++f)
    sol.uhat.segment(f * dim2(k), dim2(k)) = byface.col(f);
  sol.ustar = project_volume(em, k + 1, u);

  const ErrorReport rep =
      compute_errors(em, ms, tau, {wrap(u), q}, sol);
  CHECK(rep.e_q < 1e-12);
  CHECK(rep.e_u < 1e-12);
  CHECK(rep.e_uhat < 1e-12);
  CHECK(rep.eps_u < 1e-11);
  CHECK(rep.eps_uhat < 1e-12);
  CHECK(rep.e_star < 1e-12);
}

TEST_CASE("rates and p-ratios") {
  CHECK(rates({1.0, 0.25})[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(rates({1.3607e-1, 3.6794e-2})[0] - 1.89) < 0.005);
  const std::vector<double> pr = p_ratios({1.0, 0.1, 0.01});
  CHECK(pr[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS((void)rates({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)p_ratios({1.0, -1.0, 0.5}), std::invalid_argument);
}
