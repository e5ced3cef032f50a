// Tetrahedral mesh structures: raw vertex/element/boundary-face lists, the
// expanded form with global face numbering, face-by-element incidence,
// permutation codes and geometric quantities, plus a structured box-union
// mesh generator used by the convergence studies.
//
// Conventions (fixed repo-wide):
//   * all vertex/element/face indices are 0-based in memory,
//   * the mesh text format (read_mesh/write_mesh) is 1-based,
//   * permutation codes keep their 1..6 values.

#ifndef HDG_MESH_HPP
#define HDG_MESH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdg {

struct RawMesh {
  Eigen::MatrixXd coordinates;  // Nver x 3
  Eigen::MatrixXi elements;     // Nelt x 4, vertex order significant
  Eigen::MatrixXi dirichlet;    // Ndir x 3
  Eigen::MatrixXi neumann;      // Nneu x 3

  int n_vertices() const { return static_cast<int>(coordinates.rows()); }
  int n_elements() const { return static_cast<int>(elements.rows()); }
};

enum class FaceType : std::uint8_t { Interior = 0, Dirichlet = 1, Neumann = 2 };

// Local faces of a tetrahedron (v1,v2,v3,v4), in the fixed order
// (v1,v2,v3), (v1,v2,v4), (v1,v3,v4), (v4,v2,v3).
inline constexpr int kLocalFace[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {3, 1, 2}};
// Sign relating the parametrization normal of local face l to the outward one.
inline constexpr double kFaceNormalSign[4] = {-1.0, 1.0, -1.0, 1.0};
// Images of the reference-triangle vertices under the six affine self-maps
// F_mu; kVertexImage[mu-1][i] is the (0-based) vertex index F_mu sends w_i to.
inline constexpr int kVertexImage[6][3] = {{0, 1, 2}, {0, 2, 1}, {2, 0, 1},
                                           {2, 1, 0}, {1, 2, 0}, {1, 0, 2}};

struct ExpandedMesh {
  RawMesh raw;
  Eigen::MatrixXi faces;            // Nfc x 3, row order = intrinsic parametrization
  std::vector<FaceType> facetype;   // Nfc
  std::vector<int> dirfaces;        // rows of `faces` of Dirichlet type, input order
  std::vector<int> neufaces;        // rows of `faces` of Neumann type, input order
  Eigen::MatrixXi facebyele;        // Nelt x 4, global face number of local face l
  Eigen::MatrixXi perm;             // Nelt x 4, values in 1..6
  Eigen::VectorXd volume;           // Nelt
  Eigen::VectorXd area;             // Nfc
  Eigen::MatrixXd normals;          // Nelt x 12, outward n_l with |n_l| = |e_l|

  int n_elements() const { return raw.n_elements(); }
  int n_faces() const { return static_cast<int>(faces.rows()); }
  int n_dirichlet() const { return static_cast<int>(dirfaces.size()); }
  int n_neumann() const { return static_cast<int>(neufaces.size()); }
  int n_interior() const { return n_faces() - n_dirichlet() - n_neumann(); }

  Eigen::Vector3d normal(int K, int l) const {
    return normals.block<1, 3>(K, 3 * l).transpose();
  }
};

struct ElementGeometry {
  Eigen::Matrix3d B;   // Jacobian of F_K, columns v2-v1, v3-v1, v4-v1
  double detB;         // 6|K|
  Eigen::Matrix3d a;   // detB * B^{-T}, by the cofactor formulas
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExpandedMesh expand(const RawMesh& raw);
ElementGeometry geometry(const RawMesh& raw, int K);

// Maps reference points (rows x_hat) through F_K.
Eigen::MatrixXd map_to_element(const RawMesh& raw, int K, const Eigen::MatrixXd& pts);

// Classifies a boundary face from its centroid and unit outward normal.
using FaceClassifier =
    std::function<FaceType(const Eigen::Vector3d&, const Eigen::Vector3d&)>;

struct BoxBounds {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1, z0 = 0, z1 = 1;
};

FaceClassifier all_dirichlet();
// z = z0 and z = z1 planes Dirichlet, the four lateral faces Neumann.
FaceClassifier dirichlet_top_bottom();

// Kuhn split of an nx x ny x nz cell grid into 6 positively oriented
// tetrahedra per cell, conforming across cells.
RawMesh box_mesh(int nx, int ny, int nz, const BoxBounds& bounds,
                 const FaceClassifier& bc);

// Vertex coordinates gathered per element, one 4 x Nelt matrix per component.
void nodal_matrices(const ExpandedMesh& em, Eigen::MatrixXd& Xt,
                    Eigen::MatrixXd& Yt, Eigen::MatrixXd& Zt);

RawMesh read_mesh(std::istream& in);
RawMesh load_mesh(const std::string& path);
void write_mesh(const RawMesh& mesh, std::ostream& out);

}  // namespace hdg

#endif
