#include <benchmark/benchmark.h>

#include "muentropy/blowup_cp2.hpp"
#include "muentropy/functionals.hpp"
#include "muentropy/optimizer.hpp"

using namespace muentropy;

namespace {

const ToricSystem& blowup() {
    static ToricSystem sys = blowup_cp2_system();
    return sys;
}

void ExactExpAffine(benchmark::State& state) {
    const ToricSystem& sys = blowup();
    Vec eta = blowup_cp2_eta();
    double x = 0.8;
    for (auto _ : state) {
        AffineFn l{x * eta, 0.0};
        benchmark::DoNotOptimize(integrate_volume_exp_affine(sys, l));
        x = -x;
    }
}
BENCHMARK(ExactExpAffine);

void AdaptiveExpPa(benchmark::State& state) {
    const ToricSystem& sys = blowup();
    Rng rng(3);
    PiecewiseAffineConvex q = random_nonneg_convex(sys.polytope, rng);
    std::vector<PiecewiseAffineConvex> kinks{q};
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_volume(
            sys, [&](const Vec& y) { return std::exp(q(y) - 5.0); }, kinks));
    }
}
BENCHMARK(AdaptiveExpPa);

void SurrogateGradient(benchmark::State& state) {
    const ToricSystem& sys = blowup();
    FreeEnergyObjective obj(sys, 1.0, int(state.range(0)), 64.0, 6, 3);
    Rng rng(7);
    std::vector<double> theta(std::size_t(obj.parameter_count()));
    for (auto& v : theta) v = 0.3 * rng.normal();
    std::vector<double> grad;
    for (auto _ : state) benchmark::DoNotOptimize(obj.value_and_gradient(theta, grad));
}
BENCHMARK(SurrogateGradient)->Arg(1)->Arg(3)->Arg(10);

void FutakiEval(benchmark::State& state) {
    const ToricSystem& sys = blowup();
    Rng rng(11);
    PiecewiseAffineConvex q = random_nonneg_convex(sys.polytope, rng);
    Vec xi(2);
    xi << -0.2, -0.2;
    for (auto _ : state) benchmark::DoNotOptimize(futaki(sys, -1.0, xi, q));
}
BENCHMARK(FutakiEval);

void VectorSolve(benchmark::State& state) {
    const ToricSystem& sys = blowup();
    for (auto _ : state)
        benchmark::DoNotOptimize(optimize_vector(sys, -2.0 * M_PI, Vec::Zero(2)));
}
BENCHMARK(VectorSolve);

}  // namespace

BENCHMARK_MAIN();
