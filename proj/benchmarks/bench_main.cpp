#include "platewave/assembly.hpp"
#include "platewave/semigroup.hpp"
#include "platewave/spectral.hpp"

#include <benchmark/benchmark.h>

using namespace platewave;

namespace {

struct Problem {
  explicit Problem(int state)
      : part(make_partition(0.1, 0.9)),
        a(make_damping(part, 0.15, 0.85, 1.0, 0.05)),
        mesh(build_mesh_for_state_size(part, state)) {}
  DomainPartition part;
  DampingProfile a;
  Mesh mesh;
};

void BM_Assemble(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble(p.part, p.a, p.mesh));
  }
}
BENCHMARK(BM_Assemble)->Arg(200)->Arg(800)->Arg(2000);

void BM_CrankNicolsonStep(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const auto sys = assemble(p.part, p.a, p.mesh);
  const auto pencil = build_generator(sys);
  const CrankNicolsonStepper stepper(pencil, 0.01);
  StateVector x{random_real_vector(pencil.state_size(), 1), 0.0};
  for (auto _ : state) {
    x = stepper.step(x);
    benchmark::DoNotOptimize(x.coeffs.data());
  }
}
BENCHMARK(BM_CrankNicolsonStep)->Arg(200)->Arg(800)->Arg(2000);

void BM_Spectrum(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const auto pencil = build_generator(assemble(p.part, p.a, p.mesh));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_spectrum(pencil, default_mu_max(p.mesh)));
  }
}
BENCHMARK(BM_Spectrum)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ResolventNorm(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const auto pencil = build_generator(assemble(p.part, p.a, p.mesh));
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_norm(pencil, 25.0));
  }
}
BENCHMARK(BM_ResolventNorm)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
