#include "hdg/mesh.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace hdg {

namespace {

std::array<int, 3> sorted_triple(int a, int b, int c) {
  std::array<int, 3> t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

// Finds mu in 1..6 with global[kVertexImage[mu-1][i]] == local[i] for all i,
// i.e. phi_e o F_mu = phi_l^K checked at the reference-triangle vertices.
int find_perm(const std::array<int, 3>& global, const std::array<int, 3>& local) {
  for (int mu = 1; mu <= 6; ++mu) {
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      if (global[kVertexImage[mu - 1][i]] != local[i]) { ok = false; break; }
    if (ok) return mu;
  }
  throw MeshError("face vertex triples do not match as sets");
}

Eigen::Vector3d face_normal_half_cross(const Eigen::MatrixXd& coords,
                                       const std::array<int, 3>& tri) {
  const Eigen::Vector3d w1 = coords.row(tri[0]), w2 = coords.row(tri[1]),
                        w3 = coords.row(tri[2]);
  return 0.5 * (w2 - w1).cross(w3 - w1);
}

}  // namespace

ElementGeometry geometry(const RawMesh& raw, int K) {
  if (K < 0 || K >= raw.n_elements()) throw MeshError("element index out of range");
  ElementGeometry g;
  const Eigen::Vector3d v1 = raw.coordinates.row(raw.elements(K, 0));
  for (int c = 0; c < 3; ++c)
    g.B.col(c) =
        raw.coordinates.row(raw.elements(K, c + 1)).transpose() - v1;
  g.detB = g.B.determinant();
  const auto& X = raw.coordinates;
  const auto v = [&](int i, int c) { return X(raw.elements(K, i), c); };
  const double x1 = v(0, 0), x2 = v(1, 0), x3 = v(2, 0), x4 = v(3, 0);
  const double y1 = v(0, 1), y2 = v(1, 1), y3 = v(2, 1), y4 = v(3, 1);
  const double z1 = v(0, 2), z2 = v(1, 2), z3 = v(2, 2), z4 = v(3, 2);
  g.a << (y3 - y1) * (z4 - z1) - (y4 - y1) * (z3 - z1),
      (y4 - y1) * (z2 - z1) - (y2 - y1) * (z4 - z1),
      (y2 - y1) * (z3 - z1) - (y3 - y1) * (z2 - z1),
      (x4 - x1) * (z3 - z1) - (x3 - x1) * (z4 - z1),
      (x2 - x1) * (z4 - z1) - (x4 - x1) * (z2 - z1),
      (x3 - x1) * (z2 - z1) - (x2 - x1) * (z3 - z1),
      (x3 - x1) * (y4 - y1) - (x4 - x1) * (y3 - y1),
      (x4 - x1) * (y2 - y1) - (x2 - x1) * (y4 - y1),
      (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
  return g;
}

Eigen::MatrixXd map_to_element(const RawMesh& raw, int K, const Eigen::MatrixXd& pts) {
  const ElementGeometry g = geometry(raw, K);
  const Eigen::RowVector3d v1 = raw.coordinates.row(raw.elements(K, 0));
  return (pts * g.B.transpose()).rowwise() + v1;
}

ExpandedMesh expand(const RawMesh& raw) {
  const int nelt = raw.n_elements();
  const int ndir = static_cast<int>(raw.dirichlet.rows());
  const int nneu = static_cast<int>(raw.neumann.rows());

  for (int K = 0; K < nelt; ++K)
    if (geometry(raw, K).detB <= 0)
      throw MeshError("element " + std::to_string(K) + " has non-positive orientation");

  // Occurrences of every face as a vertex set.
  std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> incidence;
  for (int K = 0; K < nelt; ++K)
    for (int l = 0; l < 4; ++l)
      incidence[sorted_triple(raw.elements(K, kLocalFace[l][0]),
                              raw.elements(K, kLocalFace[l][1]),
                              raw.elements(K, kLocalFace[l][2]))]
          .emplace_back(K, l);

  ExpandedMesh em;
  em.raw = raw;

  std::map<std::array<int, 3>, int> face_number;
  const int nbdy = ndir + nneu;
  std::vector<std::array<int, 3>> face_triples;  // intrinsic parametrization order

  auto add_boundary = [&](const Eigen::MatrixXi& rows, FaceType type) {
    for (int r = 0; r < rows.rows(); ++r) {
      const std::array<int, 3> tri{rows(r, 0), rows(r, 1), rows(r, 2)};
      const auto key = sorted_triple(tri[0], tri[1], tri[2]);
      const auto it = incidence.find(key);
      if (it == incidence.end())
        throw MeshError("boundary face matches no element face");
      if (it->second.size() != 1)
        throw MeshError("boundary face shared by more than one element");
      if (face_number.count(key))
        throw MeshError("boundary face listed twice");
      face_number[key] = static_cast<int>(face_triples.size());
      face_triples.push_back(tri);
      em.facetype.push_back(type);
    }
  };
  add_boundary(raw.dirichlet, FaceType::Dirichlet);
  add_boundary(raw.neumann, FaceType::Neumann);

  // Interior faces appended after all boundary faces, in lexicographic order
  // of the sorted vertex triple (std::map iteration order). The intrinsic
  // parametrization is the face's occurrence in the lower-numbered element.
  for (const auto& [key, occ] : incidence) {
    if (face_number.count(key)) continue;
    if (occ.size() == 1)
      throw MeshError("element face on the boundary is not listed as Dirichlet or Neumann");
    if (occ.size() > 2)
      throw MeshError("interior face shared by more than two elements");
    const auto [K, l] = occ.front().first <= occ.back().first ? occ.front() : occ.back();
    face_number[key] = static_cast<int>(face_triples.size());
    face_triples.push_back({raw.elements(K, kLocalFace[l][0]),
                            raw.elements(K, kLocalFace[l][1]),
                            raw.elements(K, kLocalFace[l][2])});
    em.facetype.push_back(FaceType::Interior);
  }

  const int nfc = static_cast<int>(face_triples.size());
  if (4 * nelt != 2 * (nfc - nbdy) + nbdy)
    throw MeshError("face count identity violated");

  em.faces.resize(nfc, 3);
  for (int f = 0; f < nfc; ++f)
    for (int i = 0; i < 3; ++i) em.faces(f, i) = face_triples[f][i];
  for (int f = 0; f < nfc; ++f) {
    if (em.facetype[f] == FaceType::Dirichlet) em.dirfaces.push_back(f);
    if (em.facetype[f] == FaceType::Neumann) em.neufaces.push_back(f);
  }

  em.facebyele.resize(nelt, 4);
  em.perm.resize(nelt, 4);
  em.volume.resize(nelt);
  em.area.resize(nfc);
  em.normals.resize(nelt, 12);

  for (int f = 0; f < nfc; ++f)
    em.area(f) = face_normal_half_cross(raw.coordinates, face_triples[f]).norm();

  for (int K = 0; K < nelt; ++K) {
    em.volume(K) = geometry(raw, K).detB / 6.0;
    for (int l = 0; l < 4; ++l) {
      const std::array<int, 3> local{raw.elements(K, kLocalFace[l][0]),
                                     raw.elements(K, kLocalFace[l][1]),
                                     raw.elements(K, kLocalFace[l][2])};
      const int f = face_number.at(sorted_triple(local[0], local[1], local[2]));
      em.facebyele(K, l) = f;
      em.perm(K, l) = find_perm(face_triples[f], local);
      const Eigen::Vector3d n =
          kFaceNormalSign[l] * face_normal_half_cross(raw.coordinates, local);
      em.normals.block<1, 3>(K, 3 * l) = n.transpose();
    }
  }
  return em;
}

FaceClassifier all_dirichlet() {
  return [](const Eigen::Vector3d&, const Eigen::Vector3d&) {
    return FaceType::Dirichlet;
  };
}

FaceClassifier dirichlet_top_bottom() {
  return [](const Eigen::Vector3d&, const Eigen::Vector3d& nu) {
    return std::abs(nu.z()) > 0.5 ? FaceType::Dirichlet : FaceType::Neumann;
  };
}

RawMesh box_mesh(int nx, int ny, int nz, const BoxBounds& bounds,
                 const FaceClassifier& bc) {
  if (nx < 1 || ny < 1 || nz < 1) throw MeshError("box_mesh: cell counts must be >= 1");
  if (!(bounds.x1 > bounds.x0) || !(bounds.y1 > bounds.y0) || !(bounds.z1 > bounds.z0))
    throw MeshError("box_mesh: degenerate bounds");

  RawMesh mesh;
  const int nvx = nx + 1, nvy = ny + 1, nvz = nz + 1;
  mesh.coordinates.resize(nvx * nvy * nvz, 3);
  const auto vid = [&](int i, int j, int k) { return (k * nvy + j) * nvx + i; };
  for (int k = 0; k < nvz; ++k)
    for (int j = 0; j < nvy; ++j)
      for (int i = 0; i < nvx; ++i)
        mesh.coordinates.row(vid(i, j, k)) << bounds.x0 + (bounds.x1 - bounds.x0) * i / nx,
            bounds.y0 + (bounds.y1 - bounds.y0) * j / ny,
            bounds.z0 + (bounds.z1 - bounds.z0) * k / nz;

  // Kuhn split along the cell diagonal: one tetrahedron per axis permutation.
  constexpr int axis_perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  constexpr bool odd_perm[6] = {false, true, true, false, false, true};
  mesh.elements.resize(6 * nx * ny * nz, 4);
  int K = 0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (int p = 0; p < 6; ++p, ++K) {
          int step[3] = {0, 0, 0};
          std::array<int, 4> v;
          v[0] = vid(i, j, k);
          for (int s = 0; s < 3; ++s) {
            step[axis_perm[p][s]] = 1;
            v[s + 1] = vid(i + step[0], j + step[1], k + step[2]);
          }
          if (odd_perm[p]) std::swap(v[1], v[2]);  // force det B > 0
          mesh.elements.row(K) << v[0], v[1], v[2], v[3];
        }

  // Boundary faces: element faces whose vertex set occurs exactly once.
  std::map<std::array<int, 3>, int> count;
  for (int e = 0; e < mesh.elements.rows(); ++e)
    for (int l = 0; l < 4; ++l)
      ++count[sorted_triple(mesh.elements(e, kLocalFace[l][0]),
                            mesh.elements(e, kLocalFace[l][1]),
                            mesh.elements(e, kLocalFace[l][2]))];

  std::vector<std::array<int, 3>> dir, neu;
  for (int e = 0; e < mesh.elements.rows(); ++e)
    for (int l = 0; l < 4; ++l) {
      const std::array<int, 3> tri{mesh.elements(e, kLocalFace[l][0]),
                                   mesh.elements(e, kLocalFace[l][1]),
                                   mesh.elements(e, kLocalFace[l][2])};
      if (count.at(sorted_triple(tri[0], tri[1], tri[2])) != 1) continue;
      const Eigen::Vector3d centroid =
          (mesh.coordinates.row(tri[0]) + mesh.coordinates.row(tri[1]) +
           mesh.coordinates.row(tri[2])) / 3.0;
      Eigen::Vector3d n = kFaceNormalSign[l] * face_normal_half_cross(mesh.coordinates, tri);
      n.normalize();
      (bc(centroid, n) == FaceType::Dirichlet ? dir : neu).push_back(tri);
    }

  mesh.dirichlet.resize(static_cast<int>(dir.size()), 3);
  for (size_t r = 0; r < dir.size(); ++r)
    mesh.dirichlet.row(static_cast<int>(r)) << dir[r][0], dir[r][1], dir[r][2];
  mesh.neumann.resize(static_cast<int>(neu.size()), 3);
  for (size_t r = 0; r < neu.size(); ++r)
    mesh.neumann.row(static_cast<int>(r)) << neu[r][0], neu[r][1], neu[r][2];
  return mesh;
}

void nodal_matrices(const ExpandedMesh& em, Eigen::MatrixXd& Xt,
                    Eigen::MatrixXd& Yt, Eigen::MatrixXd& Zt) {
  const int nelt = em.n_elements();
  Xt.resize(4, nelt);
  Yt.resize(4, nelt);
  Zt.resize(4, nelt);
  for (int K = 0; K < nelt; ++K)
    for (int i = 0; i < 4; ++i) {
      const int v = em.raw.elements(K, i);
      Xt(i, K) = em.raw.coordinates(v, 0);
      Yt(i, K) = em.raw.coordinates(v, 1);
      Zt(i, K) = em.raw.coordinates(v, 2);
    }
}

// Text format, 1-based indices, '#' comments:
//   coordinates <Nver>   followed by Nver rows "x y z"
//   elements <Nelt>      followed by Nelt rows of 4 vertex indices
//   dirichlet <Ndir>     followed by Ndir rows of 3 vertex indices
//   neumann <Nneu>       followed by Nneu rows of 3 vertex indices
// Sections must appear in this order; dirichlet/neumann may be empty.

RawMesh read_mesh(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  size_t pos = 0;
  const auto expect = [&](const std::string& word) {
    if (pos >= tokens.size() || tokens[pos] != word)
      throw MeshError("mesh file: expected section '" + word + "'");
    ++pos;
  };
  const auto next_int = [&]() {
    if (pos >= tokens.size()) throw MeshError("mesh file: unexpected end of input");
    return std::stoi(tokens[pos++]);
  };
  const auto next_real = [&]() {
    if (pos >= tokens.size()) throw MeshError("mesh file: unexpected end of input");
    return std::stod(tokens[pos++]);
  };

  RawMesh mesh;
  expect("coordinates");
  const int nver = next_int();
  mesh.coordinates.resize(nver, 3);
  for (int r = 0; r < nver; ++r)
    for (int c = 0; c < 3; ++c) mesh.coordinates(r, c) = next_real();

  const auto read_index_block = [&](const std::string& name, int cols) {
    expect(name);
    const int n = next_int();
    Eigen::MatrixXi m(n, cols);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < cols; ++c) {
        const int v = next_int();
        if (v < 1 || v > nver) throw MeshError("mesh file: vertex index out of range");
        m(r, c) = v - 1;
      }
    return m;
  };
  mesh.elements = read_index_block("elements", 4);
  mesh.dirichlet = read_index_block("dirichlet", 3);
  mesh.neumann = read_index_block("neumann", 3);
  if (pos != tokens.size()) throw MeshError("mesh file: trailing tokens");
  return mesh;
}

RawMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  return read_mesh(in);
}

void write_mesh(const RawMesh& mesh, std::ostream& out) {
  out << "coordinates " << mesh.coordinates.rows() << "\n";
  out << std::setprecision(17);
  for (int r = 0; r < mesh.coordinates.rows(); ++r)
    out << mesh.coordinates(r, 0) << ' ' << mesh.coordinates(r, 1) << ' '
        << mesh.coordinates(r, 2) << "\n";
  const auto write_block = [&](const char* name, const Eigen::MatrixXi& m) {
    out << name << ' ' << m.rows() << "\n";
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c) + 1;
      out << "\n";
    }
  };
  write_block("elements", mesh.elements);
  write_block("dirichlet", mesh.dirichlet);
  write_block("neumann", mesh.neumann);
}

}  // namespace hdg
