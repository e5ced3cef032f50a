// Built-in manufactured problems: coefficients, exact solution, exact flux
// q = -kappa grad u, and the consistent source f = div q + c u.

#ifndef HDG_PROBLEMS_HPP
#define HDG_PROBLEMS_HPP

#include <string>
#include <vector>

#include "hdg/coefficient.hpp"
#include "hdg/mesh.hpp"

namespace hdg {

struct ProblemSpec {
  std::string name;
  ScalarField kappa, c;
  ScalarField u, f;
  VectorField q;       // exact flux
  FaceClassifier bc;   // boundary split used with generated box meshes
  BoxBounds bounds;
};

// Known problems: "paper-sine" (smooth trigonometric data), "poly-k"
// (deterministic degree-k polynomial solution, constant coefficients),
// "constant" (u == 1). degree only affects "poly-k".
ProblemSpec get_problem(const std::string& name, int degree = 1);

std::vector<std::string> problem_names();

}  // namespace hdg

#endif
