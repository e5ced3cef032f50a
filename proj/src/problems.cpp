#include "hdg/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hdg {

namespace {

using Eigen::ArrayXXd;

struct Monomial {
  int a, b, c;
  double coef;
};

ArrayXXd ipow(const ArrayXXd& x, int n) {
  ArrayXXd out = ArrayXXd::Ones(x.rows(), x.cols());
  for (int i = 0; i < n; ++i) out *= x;
  return out;
}

ScalarField monomial_field(std::vector<Monomial> terms) {
  return [terms = std::move(terms)](const ArrayXXd& X, const ArrayXXd& Y,
                                    const ArrayXXd& Z) {
    ArrayXXd out = ArrayXXd::Zero(X.rows(), X.cols());
    for (const Monomial& m : terms)
      out += m.coef * ipow(X, m.a) * ipow(Y, m.b) * ipow(Z, m.c);
    return out;
  };
}

std::vector<Monomial> derivative(const std::vector<Monomial>& terms, int axis) {
  std::vector<Monomial> out;
  for (const Monomial& m : terms) {
    Monomial d = m;
    int& e = axis == 0 ? d.a : axis == 1 ? d.b : d.c;
    if (e == 0) continue;
    d.coef *= e;
    --e;
    out.push_back(d);
  }
  return out;
}

std::vector<Monomial> scaled(std::vector<Monomial> terms, double s) {
  for (Monomial& m : terms) m.coef *= s;
  return terms;
}

ProblemSpec paper_sine() {
  ProblemSpec p;
  p.name = "paper-sine";
  p.kappa = [](const ArrayXXd& X, const ArrayXXd& Y, const ArrayXXd& Z) {
    return (2.0 + X.sin() * Y.sin() * Z.sin()).eval();
  };
  p.c = [](const ArrayXXd& X, const ArrayXXd& Y, const ArrayXXd& Z) {
    return (1.0 + 0.5 * (X.square() + Y.square() + Z.square())).eval();
  };
  p.u = [](const ArrayXXd& X, const ArrayXXd& Y, const ArrayXXd& Z) {
    return (X * Y * Z).sin().eval();
  };
  // q = -kappa grad u, grad u = (yz, xz, xy) cos(xyz)
  p.q.x = [](const ArrayXXd& X, const ArrayXXd& Y, const ArrayXXd& Z) {
    return (-(2.0 + X.sin() * Y.sin() * Z.sin()) * Y * Z * (X * Y * Z).cos()).eval();
  };
  p.q.y = [](const ArrayXXd& X, const ArrayXXd& Y, const ArrayXXd& Z) {
    return (-(2.0 + X.sin() * Y.sin() * Z.sin()) * X * Z * (X * Y * Z).cos()).eval();
  };
  p.q.z = [](const ArrayXXd& X, const ArrayXXd& Y, const ArrayXXd& Z) {
    return (-(2.0 + X.sin() * Y.sin() * Z.sin()) * X * Y * (X * Y * Z).cos()).eval();
  };
  // f = -grad kappa . grad u - kappa lap u + c u
  p.f = [](const ArrayXXd& X, const ArrayXXd& Y, const ArrayXXd& Z) {
    const ArrayXXd s = (X * Y * Z).sin(), co = (X * Y * Z).cos();
    const ArrayXXd kap = 2.0 + X.sin() * Y.sin() * Z.sin();
    const ArrayXXd gkgu =
        (X.cos() * Y.sin() * Z.sin() * Y * Z + X.sin() * Y.cos() * Z.sin() * X * Z +
         X.sin() * Y.sin() * Z.cos() * X * Y) * co;
    const ArrayXXd lap =
        -(Y.square() * Z.square() + X.square() * Z.square() + X.square() * Y.square()) * s;
    const ArrayXXd cc = 1.0 + 0.5 * (X.square() + Y.square() + Z.square());
    return (-gkgu - kap * lap + cc * s).eval();
  };
  p.bc = dirichlet_top_bottom();
  return p;
}

ProblemSpec poly_k(int degree) {
  const double kap = 2.0, cc = 1.0;
  std::vector<Monomial> terms;
  std::mt19937 gen(12345u + static_cast<unsigned>(degree));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b)
        terms.push_back({a, b, d - a - b, dist(gen)});

  ProblemSpec p;
  p.name = "poly-k";
  p.kappa = constant_field(kap);
  p.c = constant_field(cc);
  p.u = monomial_field(terms);
  const auto dx = derivative(terms, 0), dy = derivative(terms, 1),
             dz = derivative(terms, 2);
  p.q.x = monomial_field(scaled(dx, -kap));
  p.q.y = monomial_field(scaled(dy, -kap));
  p.q.z = monomial_field(scaled(dz, -kap));
  std::vector<Monomial> f = scaled(terms, cc);
  for (const auto& lap : {derivative(dx, 0), derivative(dy, 1), derivative(dz, 2)})
    for (const Monomial& m : lap) f.push_back({m.a, m.b, m.c, -kap * m.coef});
  p.f = monomial_field(std::move(f));
  p.bc = dirichlet_top_bottom();
  return p;
}

ProblemSpec constant_problem() {
  ProblemSpec p;
  p.name = "constant";
  p.kappa = constant_field(1.0);
  p.c = constant_field(1.0);
  p.u = constant_field(1.0);
  p.f = constant_field(1.0);  // c * u
  p.q = {constant_field(0.0), constant_field(0.0), constant_field(0.0)};
  p.bc = dirichlet_top_bottom();
  return p;
}

}  // namespace

ProblemSpec get_problem(const std::string& name, int degree) {
  if (name == "paper-sine") return paper_sine();
  if (name == "poly-k") return poly_k(degree);
  if (name == "constant") return constant_problem();
  throw std::invalid_argument("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
  return {"paper-sine", "poly-k", "constant"};
}

}  // namespace hdg
