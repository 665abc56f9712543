#include "fwlab/gemm.hpp"

#include <cblas.h>

namespace fwlab::blas {

void zgemm(std::size_t m, std::size_t n, std::size_t k, std::complex<double> alpha, const std::complex<double>* a,
           const std::complex<double>* b, std::complex<double> beta, std::complex<double>* c) {
  if (m == 0 || n == 0) return;
  cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<blasint>(m), static_cast<blasint>(n),
              static_cast<blasint>(k), &alpha, a, static_cast<blasint>(k), b, static_cast<blasint>(n), &beta, c,
              static_cast<blasint>(n));
}

void dgemm(std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a, const double* b, double beta,
           double* c) {
  if (m == 0 || n == 0) return;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<blasint>(m), static_cast<blasint>(n),
              static_cast<blasint>(k), alpha, a, static_cast<blasint>(k), b, static_cast<blasint>(n), beta, c,
              static_cast<blasint>(n));
}

void ssymv(std::size_t n, const float* a, const float* x, float* y) {
  if (n == 0) return;
  cblas_ssymv(CblasRowMajor, CblasUpper, static_cast<blasint>(n), 1.0f, a, static_cast<blasint>(n), x, 1, 0.0f, y, 1);
}

}  // namespace fwlab::blas
