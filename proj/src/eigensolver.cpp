#include "knn/eigensolver.hpp"

#include <lapacke.h>

#include <string>

#include "knn/error.hpp"

extern "C" void openblas_set_num_threads(int);

namespace knn::linalg {

std::vector<double> symmetric_eigenvalues(std::vector<double>& a, std::size_t n) {
  if (a.size() != n * n) throw ValidationError("symmetric_eigenvalues: buffer is not n*n");
  std::vector<double> w(n);
  const auto ni = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', ni, a.data(), ni, w.data());
  if (info != 0) throw NumericalError("dsyev failed, info=" + std::to_string(info));
  return w;
}

std::vector<double> hermitian_eigenvalues(std::vector<std::complex<double>>& a, std::size_t n) {
  if (a.size() != n * n) throw ValidationError("hermitian_eigenvalues: buffer is not n*n");
  std::vector<double> w(n);
  const auto ni = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'N', 'U', ni,
                                        reinterpret_cast<lapack_complex_double*>(a.data()), ni,
                                        w.data());
  if (info != 0) throw NumericalError("zheev failed, info=" + std::to_string(info));
  return w;
}

void use_single_threaded_blas() { openblas_set_num_threads(1); }

}  // namespace knn::linalg
