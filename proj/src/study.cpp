#include "hdg/study.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hdg {

LevelRow solve_level(const RawMesh& raw, int k, const StudyConfig& cfg,
                     const ProblemSpec& prob) {
  const ExpandedMesh em = expand(raw);
  const TetRule tet = tet_rule(2 * k + 2 + cfg.quad_bump);
  const TriRule tri = tri_rule(2 * k + 2 + cfg.quad_bump);
  const BasisTables tb = build_tables(k, tet, tri);

  StabilizationField tau = StabilizationField::constant(em, cfg.tau);
  tau.allow_zero = cfg.bdm;
  const ElementMatrixSet ms =
      build_element_matrices(em, tb, tet, tri, prob.kappa, prob.c, prob.f, tau);
  const LocalBlocks lb = cfg.bdm ? bdm_blocks(ms) : local_blocks(ms);
  const CondensedSystem cs = condense(lb, cfg.threads);

  SkeletonSystem sys = assemble(em, cs);
  sys.b -= neumann_load(em, k, tri, prob.q);
  const Eigen::VectorXd ub = dirichlet_project(em, k, tri, prob.u);

  DiscreteSolution sol;
  sol.k = k;
  sol.uhat = solve_skeleton(em, sys, ub);
  sol.fields = local_recover(lb, gather_traces(em, tb.d2, sol.uhat), cfg.threads);

  const TetRule star_rule = tet_rule(2 * (k + 1) + 2 + cfg.quad_bump);
  const BasisTables tb1 = build_tables(k + 1, star_rule, tri);
  sol.ustar = postprocess_star(em, tb1, star_rule, prob.kappa, sol.fields,
                               cfg.threads);

  LevelRow row;
  row.nelt = em.n_elements();
  row.nfc = em.n_faces();
  row.err = compute_errors(em, ms, tau, {prob.u, prob.q}, sol, cfg.threads);
  return row;
}

StudyReport run_study(const StudyConfig& cfg, const ProblemSpec& prob) {
  StudyReport rep;
  rep.pstudy = cfg.pstudy;
  if (cfg.pstudy) {
    RawMesh raw;
    if (!cfg.mesh_file.empty())
      raw = load_mesh(cfg.mesh_file);
    else {
      const int n = cfg.base_n * 2;  // the fixed level-2 mesh
      raw = box_mesh(n, n, n, prob.bounds, prob.bc);
    }
    for (int k = cfg.pmin; k <= cfg.pmax; ++k) {
      try {
        LevelRow row = solve_level(raw, k, cfg, prob);
        row.level = k;
        rep.rows.push_back(row);
      } catch (const std::exception& e) {
        throw std::runtime_error("degree " + std::to_string(k) + ": " + e.what());
      }
    }
    return rep;
  }

  const int levels = cfg.mesh_file.empty() ? cfg.levels : 1;
  for (int lev = 1; lev <= levels; ++lev) {
    RawMesh raw;
    if (!cfg.mesh_file.empty())
      raw = load_mesh(cfg.mesh_file);
    else {
      const int n = cfg.base_n << (lev - 1);
      raw = box_mesh(n, n, n, prob.bounds, prob.bc);
    }
    try {
      LevelRow row = solve_level(raw, cfg.degree, cfg, prob);
      row.level = lev;
      rep.rows.push_back(row);
    } catch (const std::exception& e) {
      throw std::runtime_error("level " + std::to_string(lev) + ": " + e.what());
    }
  }
  return rep;
}

namespace {

std::vector<double> column(const StudyReport& rep, int which) {
  std::vector<double> out;
  for (const LevelRow& r : rep.rows) {
    const ErrorReport& e = r.err;
    out.push_back(which == 0   ? e.e_q
                  : which == 1 ? e.e_u
                  : which == 2 ? e.e_uhat
                  : which == 3 ? e.eps_u
                  : which == 4 ? e.eps_uhat
                               : e.e_star);
  }
  return out;
}

// rate entries aligned with rows: h-study rates lag one row, p-study Eq-ratio
// entries lag two; rows without a value get NaN.
std::vector<double> rate_column(const StudyReport& rep, int which) {
  const std::vector<double> err = column(rep, which);
  std::vector<double> out(err.size(), std::nan(""));
  for (double e : err)
    if (!(e > 0)) return out;  // degenerate (e.g. exact-to-roundoff) columns
  if (rep.pstudy) {
    const std::vector<double> pr = p_ratios(err);
    for (std::size_t i = 0; i < pr.size(); ++i) out[i + 2] = pr[i];
  } else {
    const std::vector<double> rr = rates(err);
    for (std::size_t i = 0; i < rr.size(); ++i) out[i + 1] = rr[i];
  }
  return out;
}

}  // namespace

void write_report(const StudyReport& rep, std::ostream& os,
                  const std::string& format) {
  const char* names[6] = {"e_q", "e_u", "e_\xc3\xbb", "eps_u", "eps_\xc3\xbb", "e_star"};
  std::vector<std::vector<double>> errs(6), rts(6);
  for (int c = 0; c < 6; ++c) {
    errs[c] = column(rep, c);
    rts[c] = rate_column(rep, c);
  }
  char buf[64];
  if (format == "csv") {
    os << (rep.pstudy ? "k" : "level") << ",Nelt,Nfc";
    for (int c = 0; c < 6; ++c) os << ',' << names[c] << ",r";
    os << '\n';
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      os << rep.rows[i].level << ',' << rep.rows[i].nelt << ',' << rep.rows[i].nfc;
      for (int c = 0; c < 6; ++c) {
        std::snprintf(buf, sizeof buf, "%.10e", errs[c][i]);
        os << ',' << buf << ',';
        if (!std::isnan(rts[c][i])) {
          std::snprintf(buf, sizeof buf, "%.4f", rts[c][i]);
          os << buf;
        }
      }
      os << '\n';
    }
    return;
  }
  if (format != "txt")
    throw std::invalid_argument("unknown output format '" + format + "'");

  std::snprintf(buf, sizeof buf, "%5s %8s %8s", rep.pstudy ? "k" : "level",
                "Nelt", "Nfc");
  os << buf;
  for (int c = 0; c < 6; ++c) {
    std::snprintf(buf, sizeof buf, " %10s %6s", names[c], "r");
    os << buf;
  }
  os << '\n';
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%5d %8d %8d", rep.rows[i].level,
                  rep.rows[i].nelt, rep.rows[i].nfc);
    os << buf;
    for (int c = 0; c < 6; ++c) {
      std::snprintf(buf, sizeof buf, " %10.4e", errs[c][i]);
      os << buf;
      if (std::isnan(rts[c][i]))
        os << "      -";
      else {
        std::snprintf(buf, sizeof buf, " %6.2f", rts[c][i]);
        os << buf;
      }
    }
    os << '\n';
  }
}

}  // namespace hdg
