#include "vrin/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vrin::kernels {

namespace {

inline double logistic(double x) {
    // Split on sign so exp never overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

namespace serial {

void matmul_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.data() + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data() + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            c[i * n + j] += s;
        }
    }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b.data() + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double api = a[p * m + i];
            double* ci = c.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
        }
    }
}

void tanh(std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
}

void sigmoid(std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = logistic(x[i]);
}

void exp(std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
}

}  // namespace serial

namespace parallel {

void matmul_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        double* ci = c.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const double* ai = a.data() + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data() + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            c[i * n + j] += s;
        }
    }
}

// Parallel over output rows; each c[i, :] still sees p in ascending order,
// matching the serial p-outer loop element for element.
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        double* ci = c.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double api = a[p * m + i];
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
        }
    }
}

void tanh(std::span<const double> x, std::span<double> y) {
    const auto len = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < len; ++i) y[i] = std::tanh(x[i]);
}

void sigmoid(std::span<const double> x, std::span<double> y) {
    const auto len = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < len; ++i) y[i] = logistic(x[i]);
}

void exp(std::span<const double> x, std::span<double> y) {
    const auto len = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < len; ++i) y[i] = std::exp(x[i]);
}

}  // namespace parallel

void matmul_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    if (m * k * n >= kParallelMatmulWork && m > 1) {
        parallel::matmul_nn(a, b, c, m, k, n);
    } else {
        serial::matmul_nn(a, b, c, m, k, n);
    }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    if (m * k * n >= kParallelMatmulWork && m > 1) {
        parallel::matmul_nt(a, b, c, m, k, n);
    } else {
        serial::matmul_nt(a, b, c, m, k, n);
    }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n) {
    if (m * k * n >= kParallelMatmulWork && m > 1) {
        parallel::matmul_tn(a, b, c, m, k, n);
    } else {
        serial::matmul_tn(a, b, c, m, k, n);
    }
}

void tanh(std::span<const double> x, std::span<double> y) {
    if (x.size() >= kParallelElementwise) {
        parallel::tanh(x, y);
    } else {
        serial::tanh(x, y);
    }
}

void sigmoid(std::span<const double> x, std::span<double> y) {
    if (x.size() >= kParallelElementwise) {
        parallel::sigmoid(x, y);
    } else {
        serial::sigmoid(x, y);
    }
}

void exp(std::span<const double> x, std::span<double> y) {
    if (x.size() >= kParallelElementwise) {
        parallel::exp(x, y);
    } else {
        serial::exp(x, y);
    }
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace vrin::kernels
