// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/assembly.hpp"
#include "msfem/estimator.hpp"
#include "msfem/mesh.hpp"
#include "msfem/thickness.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

msfem::Mesh2D square_mesh(int n) {
  return msfem::Mesh2D::rectangle(1.0, 1.0, n, n,
                                  [](double, double) { return msfem::RegionTag::conductor; },
                                  {msfem::BoundaryTag::symmetry, msfem::BoundaryTag::symmetry,
                                   msfem::BoundaryTag::symmetry, msfem::BoundaryTag::symmetry});
}

// Laminated sheet patch with physical edges top and bottom, so the solve
// and estimator paths see a non-trivial field.
msfem::ProblemSetup sheet_setup(int n) {
  msfem::ProblemSetup setup;
  setup.mesh = msfem::build_rect_mesh(
      4e-3, 4e-3, n, n, [](double, double) { return msfem::RegionTag::conductor; },
      {msfem::BoundaryTag::symmetry, msfem::BoundaryTag::symmetry,
       msfem::BoundaryTag::outer, msfem::BoundaryTag::outer});
  setup.profile = msfem::ThicknessProfile::from_fill_factor(0.5e-3, 0.95);
  setup.conductor = {2.08e6, 1000 * 4e-7 * std::numbers::pi};
  setup.air = {0.0, 4e-7 * std::numbers::pi};
  setup.frequency = 50.0;
  setup.source = msfem::BiotSavartSource::uniform(Eigen::Vector2d(1.0, 0.0));
  return setup;
}

void BM_CoefficientTable(benchmark::State& state) {
  msfem::ThicknessProfile profile(0.475e-3, 0.025e-3);
  for (auto _ : state) {
    auto table = msfem::coefficient_table(2.08e6, 0.0, profile);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_CoefficientTable);

void BM_UniformRefine(benchmark::State& state) {
  auto mesh = square_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto fine = mesh.uniform_refine();
    benchmark::DoNotOptimize(fine);
  }
  state.SetItemsProcessed(state.iterations() * mesh.triangle_count());
}
BENCHMARK(BM_UniformRefine)->Arg(16)->Arg(32);

void BM_AssembleMsfem(benchmark::State& state) {
  const auto setup = sheet_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sys = msfem::assemble_msfem(setup);
    benchmark::DoNotOptimize(sys);
  }
  state.SetItemsProcessed(state.iterations() * setup.mesh.triangle_count());
}
BENCHMARK(BM_AssembleMsfem)->Arg(8)->Arg(16);

void BM_SolveMsfem(benchmark::State& state) {
  const auto setup = sheet_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sol = msfem::solve_msfem(setup);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveMsfem)->Arg(8)->Arg(16);

void BM_Equilibration(benchmark::State& state) {
  const auto setup = sheet_setup(static_cast<int>(state.range(0)));
  const auto sol = msfem::solve_msfem(setup);
  for (auto _ : state) {
    auto flux = msfem::solve_equilibration(setup, sol);
    benchmark::DoNotOptimize(flux);
  }
}
BENCHMARK(BM_Equilibration)->Arg(8)->Arg(16);

void BM_Indicators(benchmark::State& state) {
  const auto setup = sheet_setup(static_cast<int>(state.range(0)));
  const auto sol = msfem::solve_msfem(setup);
  const auto flux = msfem::solve_equilibration(setup, sol);
  for (auto _ : state) {
    auto ind = msfem::evaluate_indicators(setup, sol, flux);
    benchmark::DoNotOptimize(ind);
  }
  state.SetItemsProcessed(state.iterations() * setup.mesh.triangle_count());
}
BENCHMARK(BM_Indicators)->Arg(8)->Arg(16);

} // namespace

BENCHMARK_MAIN();
