// Command-line convergence-study driver.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "hdg/study.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HDG convergence studies for 3D reaction-diffusion"};

  hdg::StudyConfig cfg;
  std::string problem = "paper-sine";
  std::string out_path, format = "txt";

  app.add_option("--problem", problem, "manufactured problem")
      ->check(CLI::IsMember(hdg::problem_names()))
      ->capture_default_str();
  app.add_option("--degree", cfg.degree, "polynomial degree k")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--levels", cfg.levels, "number of refinement levels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tau", cfg.tau, "stabilization value")->capture_default_str();
  app.add_flag("--bdm", cfg.bdm, "reduced-space variant (tau = 0, k >= 1)");
  app.add_flag("--pstudy", cfg.pstudy, "sweep the degree on a fixed mesh");
  app.add_option("--quad-bump", cfg.quad_bump,
                 "extra quadrature exactness beyond the default")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--mesh", cfg.mesh_file, "mesh file instead of the box generator");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"txt", "csv"}))
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads per level")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (cfg.bdm) cfg.tau = 0.0;

  try {
    const hdg::ProblemSpec prob = hdg::get_problem(problem, cfg.degree);
    const hdg::StudyReport rep = hdg::run_study(cfg, prob);
    if (out_path.empty()) {
      hdg::write_report(rep, std::cout, format);
    } else {
      std::ofstream os(out_path);
      if (!os) throw std::runtime_error("cannot open '" + out_path + "'");
      hdg::write_report(rep, os, format);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
