// Convergence-study driver: runs the full solve/postprocess pipeline over a
// mesh refinement sequence (or a degree sweep in p-study mode) and emits the
// error/rate tables.

#ifndef HDG_STUDY_HPP
#define HDG_STUDY_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "hdg/postprocess.hpp"
#include "hdg/problems.hpp"

namespace hdg {

struct StudyConfig {
  int degree = 1;
  int levels = 3;
  int base_n = 2;     // cells per axis on the coarsest level, doubled per level
  double tau = 1.0;
  bool bdm = false;
  bool pstudy = false;
  int pmin = 0, pmax = 3;  // degree sweep in p-study mode
  int quad_bump = 0;       // added to the default 2k+2 quadrature exactness
  std::string mesh_file;   // bypasses the box generator (single level)
  int threads = 1;
};

struct LevelRow {
  int level = 0;  // refinement level, or the degree k in p-study mode
  int nelt = 0, nfc = 0;
  ErrorReport err;
};

struct StudyReport {
  bool pstudy = false;
  std::vector<LevelRow> rows;
};

// Solves one mesh/degree combination end to end.
LevelRow solve_level(const RawMesh& raw, int k, const StudyConfig& cfg,
                     const ProblemSpec& prob);

StudyReport run_study(const StudyConfig& cfg, const ProblemSpec& prob);

// format is "txt" (aligned table) or "csv".
void write_report(const StudyReport& rep, std::ostream& os, const std::string& format);

}  // namespace hdg

#endif
