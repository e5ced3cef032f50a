// Vectorized coefficient fields: callables evaluated on whole arrays of
// quadrature-point coordinates at once.

#ifndef HDG_COEFFICIENT_HPP
#define HDG_COEFFICIENT_HPP

#include <Eigen/Dense>
#include <functional>

namespace hdg {

// Evaluates a scalar field at point arrays; result has the shape of X.
using ScalarField = std::function<Eigen::ArrayXXd(
    const Eigen::ArrayXXd&, const Eigen::ArrayXXd&, const Eigen::ArrayXXd&)>;

struct VectorField {
  ScalarField x, y, z;
};

inline ScalarField constant_field(double value) {
  return [value](const Eigen::ArrayXXd& X, const Eigen::ArrayXXd&,
                 const Eigen::ArrayXXd&) {
    return Eigen::ArrayXXd::Constant(X.rows(), X.cols(), value).eval();
  };
}

inline ScalarField pointwise_field(std::function<double(double, double, double)> f) {
  return [f = std::move(f)](const Eigen::ArrayXXd& X, const Eigen::ArrayXXd& Y,
                            const Eigen::ArrayXXd& Z) {
    Eigen::ArrayXXd out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      for (Eigen::Index i = 0; i < X.rows(); ++i)
        out(i, j) = f(X(i, j), Y(i, j), Z(i, j));
    return out;
  };
}

}  // namespace hdg

#endif
