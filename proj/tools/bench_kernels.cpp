// Serial vs OpenMP kernel comparison at experiment scale, plus one
// end-to-end tube projection. Run with --benchmark_time_unit=ms.

#include <benchmark/benchmark.h>

#include "wbpdq/kernels.hpp"
#include "wbpdq/prox.hpp"
#include "wbpdq/rng.hpp"
#include "wbpdq/types.hpp"

using namespace wbpdq;
using kernels::Exec;

namespace {

Mat random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

template <Exec E>
void bm_mul_transpose(benchmark::State& state) {
    const Index m = state.range(0), n = state.range(1);
    const Mat a = random_matrix(n, m, 1);  // columns are rows of the operator
    Rng rng(2);
    const Vec v = rng.normal_vector(n);
    Vec out;
    for (auto _ : state) {
        kernels::mul_transpose(a, v, out, E);
        benchmark::DoNotOptimize(out.data());
    }
}

template <Exec E>
void bm_self_gram(benchmark::State& state) {
    const Index m = state.range(0), n = state.range(1);
    const Mat a = random_matrix(n, m, 3);
    Mat g;
    for (auto _ : state) {
        kernels::self_gram(a, g, E);
        benchmark::DoNotOptimize(g.data());
    }
}

template <Exec E>
void bm_soft_threshold(benchmark::State& state) {
    const Index n = state.range(0);
    Rng rng(4);
    const Vec x = rng.normal_vector(n);
    const Vec t = Vec::Constant(n, 0.3);
    Vec out;
    for (auto _ : state) {
        kernels::soft_threshold(x, t, out, E);
        benchmark::DoNotOptimize(out.data());
    }
}

template <Exec E>
void bm_tube_projection(benchmark::State& state) {
    const Index m = state.range(0), n = state.range(1);
    kernels::set_execution(E);
    const SensingMatrix phi(random_matrix(m, n, 5));
    Rng rng(6);
    Vec truth = Vec::Zero(n);
    for (Index i : rng.sample_indices(n, 16)) truth[i] = rng.normal();
    const Vec y = phi.apply(truth);
    const TubeConstraint tube(phi, y, 0.1 * y.norm(), 10.0);
    const Vec x = rng.normal_vector(n);
    for (auto _ : state) {
        Vec u = project_tube(x, tube);
        benchmark::DoNotOptimize(u.data());
    }
    kernels::set_execution(Exec::parallel);
}

}  // namespace

BENCHMARK(bm_mul_transpose<Exec::serial>)->Args({256, 1024});
BENCHMARK(bm_mul_transpose<Exec::parallel>)->Args({256, 1024});
BENCHMARK(bm_self_gram<Exec::serial>)->Args({256, 1024});
BENCHMARK(bm_self_gram<Exec::parallel>)->Args({256, 1024});
BENCHMARK(bm_soft_threshold<Exec::serial>)->Arg(1 << 16);
BENCHMARK(bm_soft_threshold<Exec::parallel>)->Arg(1 << 16);
BENCHMARK(bm_tube_projection<Exec::serial>)->Args({256, 1024});
BENCHMARK(bm_tube_projection<Exec::parallel>)->Args({256, 1024});

BENCHMARK_MAIN();
