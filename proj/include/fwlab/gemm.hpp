#pragma once

#include <complex>
#include <cstddef>

namespace fwlab::blas {

// Row-major C = alpha * A(m x k) * B(k x n) + beta * C.
void zgemm(std::size_t m, std::size_t n, std::size_t k, std::complex<double> alpha, const std::complex<double>* a,
           const std::complex<double>* b, std::complex<double> beta, std::complex<double>* c);

void dgemm(std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a, const double* b, double beta,
           double* c);

// y = A x for a symmetric row-major n x n matrix; only the upper triangle is read.
void ssymv(std::size_t n, const float* a, const float* x, float* y);

}  // namespace fwlab::blas
