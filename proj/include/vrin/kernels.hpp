#pragma once

// Dense inner loops used by the autodiff ops. Every kernel exists twice:
// `serial` is the reference and `parallel` splits the outermost output
// dimension across OpenMP threads. Each output element is accumulated in the
// same order in both, so results are bit-identical regardless of thread
// count. The unqualified entry points pick one based on problem size.
//
// All matmul kernels accumulate into `c` (c += ...). Callers zero `c` first
// when they want an overwrite.

#include <cstddef>
#include <span>

namespace vrin::kernels {

namespace serial {
// c[m,n] += a[m,k] * b[k,n]
void matmul_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
// c[m,n] += a[m,k] * b[n,k]^T
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
// c[m,n] += a[k,m]^T * b[k,n]
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
void tanh(std::span<const double> x, std::span<double> y);
void sigmoid(std::span<const double> x, std::span<double> y);
void exp(std::span<const double> x, std::span<double> y);
}  // namespace serial

namespace parallel {
void matmul_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
void tanh(std::span<const double> x, std::span<double> y);
void sigmoid(std::span<const double> x, std::span<double> y);
void exp(std::span<const double> x, std::span<double> y);
}  // namespace parallel

// Work (multiply-adds or elements) above which the dispatchers go parallel.
inline constexpr std::size_t kParallelMatmulWork = 1u << 16;
inline constexpr std::size_t kParallelElementwise = 1u << 14;

void matmul_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n);
void tanh(std::span<const double> x, std::span<double> y);
void sigmoid(std::span<const double> x, std::span<double> y);
void exp(std::span<const double> x, std::span<double> y);

int max_threads();

}  // namespace vrin::kernels
