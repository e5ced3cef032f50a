#include "hdg/convdiff.hpp"

namespace hdg {

ConvectionBilinearSet convection_bilinear_matrices(const ExpandedMesh& em,
                                                   const BasisTables& tb,
                                                   const TetRule& tet,
                                                   const TriRule& tri,
                                                   const VectorField& beta) {
  const int d3 = tb.d3, d2 = tb.d2, nelt = em.n_elements();
  ConvectionBilinearSet out;
  out.vol = Batch3(d3, d3, nelt);
  out.dp = Batch3(4 * d2, d3, nelt);
  out.dd = Batch3(4 * d2, 4 * d2, nelt);

  const ScalarField* comp[3] = {&beta.x, &beta.y, &beta.z};
  for (int star = 0; star < 3; ++star) {
    Batch3 Cx, Cy, Cz;
    variable_convection_matrices(em, tb, tet, *comp[star], Cx, Cy, Cz);
    const Batch3* pick[3] = {&Cx, &Cy, &Cz};
    out.vol.data += pick[star]->data;

    const Eigen::MatrixXd nw = normal_weights(em, star);
    out.dp.data += variable_surface_dp(em, tb, tri, *comp[star], nw).data;
    out.dd.data += variable_surface_dd(em, tb, tri, *comp[star], nw).data;
  }
  return out;
}

}  // namespace hdg
