// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/config.hpp"
#include "msfem/errors.hpp"
#include "msfem/estimator.hpp"
#include "msfem/thickness.hpp"
#include "msfem/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace msfem;

std::string hex_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// The potential gauge actually applied by the assembly for this mesh.
std::string phi0_gauge(const Mesh2D& mesh) {
  for (int e = 0; e < mesh.edge_count(); ++e)
    if (mesh.boundary_tag(e) == BoundaryTag::symmetry) return "symmetry-dirichlet";
  for (int e = 0; e < mesh.edge_count(); ++e)
    if (mesh.boundary_tag(e) == BoundaryTag::outer) return "outer-vertex-pin";
  return "component-pin";
}

nlohmann::json base_manifest(const Config& cfg, const std::string& command) {
  return {
      {"command", command},
      {"version", version_string},
      {"config_hash", hex_hash(cfg.hash)},
      {"nodal_order", cfg.setup.nodal_order},
      {"edge_order", cfg.setup.edge_order},
      {"gauge",
       {{"phi0", phi0_gauge(cfg.setup.mesh)},
        {"equilibration", "component-pin per potential block"}}},
      {"marking_threshold", cfg.adaptivity.threshold},
  };
}

void write_manifest(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

// Centroid-sampled cell fields of a solved state.
std::vector<VtkCellField> solution_fields(const ProblemSetup& setup,
                                          const MsfemSolution& sol) {
  const Mesh2D& mesh = setup.mesh;
  const CoefficientTable tab =
      coefficient_table(1.0 / setup.conductor.sigma, 0.0, setup.profile);
  const double center[3] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::vector<double> t2_abs(mesh.triangle_count(), 0.0);
  std::vector<double> curl_abs(mesh.triangle_count(), 0.0);
  std::vector<double> loss(mesh.triangle_count(), 0.0);
  std::vector<double> phi0_re(mesh.triangle_count(), 0.0);
  std::vector<double> phi0_im(mesh.triangle_count(), 0.0);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Complex p = sol.phi0_space->eval(sol.phi0, t, center);
    phi0_re[t] = p.real();
    phi0_im[t] = p.imag();
    if (mesh.triangle(t).region != RegionTag::conductor) continue;
    const Vector2c t2 = sol.t2_space->eval(sol.t2, t, center);
    const Complex c = sol.t2_space->eval_curl(sol.t2, t, center);
    t2_abs[t] = std::sqrt(t2.squaredNorm());
    curl_abs[t] = std::abs(c);
    loss[t] = 0.5 * (tab.phi2_prime_sq * t2.squaredNorm() + tab.phi2_sq * std::norm(c));
  }
  return {{"t2_abs", t2_abs},
          {"curl_abs", curl_abs},
          {"loss_density", loss},
          {"phi0_re", phi0_re},
          {"phi0_im", phi0_im}};
}

std::vector<VtkCellField> indicator_field(const Mesh2D& mesh, const IndicatorField& ind) {
  std::vector<double> eta(mesh.triangle_count(), 0.0);
  for (size_t i = 0; i < ind.cells.size(); ++i) eta[ind.cells[i]] = ind.eta_sq[i];
  return {{"eta_sq", eta}};
}

int run_solve(const std::string& config_path, const std::string& outdir) {
  const Config cfg = parse_config_file(config_path);
  std::filesystem::create_directories(outdir);
  const MsfemSolution sol = solve_msfem(cfg.setup);
  const Eigen::Index n_dof = sol.t2.size() + sol.phi0.size();
  const double losses = msfem_losses(cfg.setup, sol);
  const double area = cfg.setup.mesh.total_area();

  const std::filesystem::path out(outdir);
  write_vtk(cfg.setup.mesh, (out / "solution.vtk").string(),
            solution_fields(cfg.setup, sol));
  nlohmann::json manifest = base_manifest(cfg, "solve");
  manifest["n_dof"] = n_dof;
  manifest["losses_w"] = losses;
  write_manifest(out / "manifest.json", manifest);

  std::printf("n_dof %lld\n", static_cast<long long>(n_dof));
  std::printf("losses_w %.17g\n", losses);
  std::printf("loss_density_w_per_m2 %.17g\n", losses / area);
  return 0;
}

int run_adapt(const std::string& config_path, const std::string& outdir, int max_iter,
              long long dof_budget, bool uniform, int ref_levels, bool with_error) {
  const Config cfg = parse_config_file(config_path);
  std::filesystem::create_directories(outdir);

  AdaptiveOptions opt;
  opt.max_iterations = max_iter >= 0 ? max_iter : cfg.adaptivity.max_iterations;
  opt.dof_budget = dof_budget >= 0 ? dof_budget : cfg.adaptivity.dof_budget;
  opt.mark_threshold = cfg.adaptivity.threshold;
  opt.uniform = uniform;
  opt.with_reference = with_error;
  opt.reference_levels = ref_levels;
  const AdaptiveResult res = adaptive_loop(cfg.setup, opt);

  const std::filesystem::path out(outdir);
  std::ofstream csv(out / "convergence.csv");
  csv << "iteration,n_dof,eta_total,error,efficiency\n";
  for (const AdaptiveRow& row : res.history) {
    csv << row.iteration << "," << row.n_dof << "," << csv_number(row.eta_total) << ",";
    if (row.error) csv << csv_number(*row.error);
    csv << ",";
    if (row.efficiency) csv << csv_number(*row.efficiency);
    csv << "\n";
  }
  csv.close();

  for (size_t i = 0; i < res.meshes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "adapt_%03zu.vtk", i);
    write_vtk(res.meshes[i], (out / name).string(),
              indicator_field(res.meshes[i], res.indicators[i]));
  }

  nlohmann::json manifest = base_manifest(cfg, "adapt");
  manifest["iterations"] = res.history.size() - 1;
  manifest["uniform"] = uniform;
  manifest["converged"] = res.converged;
  manifest["final_n_dof"] = res.history.back().n_dof;
  manifest["final_eta_total"] = res.history.back().eta_total;
  write_manifest(out / "manifest.json", manifest);

  for (const AdaptiveRow& row : res.history)
    std::printf("iter %d n_dof %lld eta_total %.6e\n", row.iteration,
                static_cast<long long>(row.n_dof), row.eta_total);
  return 0;
}

void print_table(const char* title, const CoefficientTable& tab) {
  std::printf("coefficient table (%s):\n", title);
  std::printf("  phi1_hat_sq       %.10g\n", tab.phi1_hat_sq);
  std::printf("  phi2_sq           %.10g\n", tab.phi2_sq);
  std::printf("  phi2_prime_sq     %.10g\n", tab.phi2_prime_sq);
  std::printf("  phi0_phi2         %.10g\n", tab.phi0_phi2);
  std::printf("  phi3_hat_sq       %.10g\n", tab.phi3_hat_sq);
  std::printf("  phi1_hat_phi3_hat %.10g\n", tab.phi1_hat_phi3_hat);
  std::printf("  phi0_sq_full      %.10g\n", tab.phi0_sq_full);
  std::printf("  phi0_sq_sheet     %.10g\n", tab.phi0_sq_sheet);
}

int run_check(const std::string& config_path) {
  const Config cfg = parse_config_file(config_path);
  const ThicknessProfile& p = cfg.setup.profile;
  std::printf("config ok (hash %s)\n", hex_hash(cfg.hash).c_str());
  std::printf("mesh: %d vertices, %d triangles\n", cfg.setup.mesh.vertex_count(),
              cfg.setup.mesh.triangle_count());
  std::printf("sheet: d_fe %.10g d0 %.10g fill %.10g\n", p.d_fe, p.d0,
              p.d_fe / p.d());
  print_table("unit, kappa_fe=1, kappa_0=0", coefficient_table(1.0, 0.0, p));
  print_table("conductivity", coefficient_table(cfg.setup.conductor.sigma, 0.0, p));
  print_table("permeability",
              coefficient_table(cfg.setup.conductor.mu, cfg.setup.air.mu, p));
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D/1D multiscale eddy-current solver for laminated cores"};
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir = ".";
  int max_iter = -1;
  long long dof_budget = -1;
  bool uniform = false;
  int ref_levels = 2;
  bool no_error = false;

  CLI::App* solve = app.add_subcommand("solve", "Solve the configured problem once");
  solve->add_option("config", config_path, "problem config file")->required();
  solve->add_option("-o,--output", outdir, "output directory");

  CLI::App* adapt =
      app.add_subcommand("adapt", "Run the adaptive (or uniform) refinement loop");
  adapt->add_option("config", config_path, "problem config file")->required();
  adapt->add_option("-o,--output", outdir, "output directory");
  adapt->add_option("--max-iter", max_iter, "refinement iterations (default: config)");
  adapt->add_option("--dof-budget", dof_budget, "DOF budget (default: config)");
  adapt->add_flag("--uniform", uniform, "refine uniformly instead of marking");
  adapt->add_option("--ref-levels", ref_levels, "overkill levels for the error column");
  adapt->add_flag("--no-error", no_error, "skip the overkill error computation");

  CLI::App* check = app.add_subcommand("check", "Validate a config and print its tables");
  check->add_option("config", config_path, "problem config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(config_path, outdir);
    if (adapt->parsed())
      return run_adapt(config_path, outdir, max_iter, dof_budget, uniform, ref_levels,
                       !no_error);
    return run_check(config_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SingularSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
