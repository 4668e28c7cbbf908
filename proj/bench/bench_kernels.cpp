// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "jdgsvd/btb.hpp"
#include "jdgsvd/generators.hpp"
#include "jdgsvd/sparse_kernels.hpp"

namespace {

using namespace jdgsvd;

SparseMatrix bench_matrix(Index n) { return random_sparse(n, n, 20.0 / static_cast<double>(n), 7); }

void BM_spmv_serial(benchmark::State& st) {
    const SparseMatrix a = bench_matrix(st.range(0));
    const Vector x = Vector::Ones(a.cols());
    for (auto _ : st) benchmark::DoNotOptimize(serial::spmv(a, x));
    st.SetItemsProcessed(st.iterations() * a.nnz());
}

void BM_spmv_parallel(benchmark::State& st) {
    const SparseMatrix a = bench_matrix(st.range(0));
    const Vector x = Vector::Ones(a.cols());
    for (auto _ : st) benchmark::DoNotOptimize(parallel::spmv(a, x));
    st.SetItemsProcessed(st.iterations() * a.nnz());
}

void BM_spmv_transpose_serial(benchmark::State& st) {
    const SparseMatrix a = bench_matrix(st.range(0));
    const Vector y = Vector::Ones(a.rows());
    for (auto _ : st) benchmark::DoNotOptimize(serial::spmv_transpose(a, y));
    st.SetItemsProcessed(st.iterations() * a.nnz());
}

void BM_spmv_transpose_parallel(benchmark::State& st) {
    const SparseMatrix a = bench_matrix(st.range(0));
    const Vector y = Vector::Ones(a.rows());
    for (auto _ : st) benchmark::DoNotOptimize(parallel::spmv_transpose(a, y));
    st.SetItemsProcessed(st.iterations() * a.nnz());
}

// The multiple right-hand sides A^T U of the CPF cache, solved column by column.
void BM_btb_columns_serial(benchmark::State& st) {
    const SparseMatrix b = generate_b(BKind::T, st.range(0));
    const BtbSolver solver(b, SolverOptions{});
    Rng rng(3);
    const Matrix rhs = rng.normal_matrix(b.cols(), 30);
    for (auto _ : st) benchmark::DoNotOptimize(solver.solve_columns_serial(rhs));
}

void BM_btb_columns_parallel(benchmark::State& st) {
    const SparseMatrix b = generate_b(BKind::T, st.range(0));
    const BtbSolver solver(b, SolverOptions{});
    Rng rng(3);
    const Matrix rhs = rng.normal_matrix(b.cols(), 30);
    for (auto _ : st) benchmark::DoNotOptimize(solver.solve_columns(rhs));
}

}  // namespace

BENCHMARK(BM_spmv_serial)->Arg(20000)->Arg(200000);
BENCHMARK(BM_spmv_parallel)->Arg(20000)->Arg(200000);
BENCHMARK(BM_spmv_transpose_serial)->Arg(20000)->Arg(200000);
BENCHMARK(BM_spmv_transpose_parallel)->Arg(20000)->Arg(200000);
BENCHMARK(BM_btb_columns_serial)->Arg(20000)->Arg(200000);
BENCHMARK(BM_btb_columns_parallel)->Arg(20000)->Arg(200000);

BENCHMARK_MAIN();
