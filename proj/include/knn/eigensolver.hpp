#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace knn::linalg {

/// Eigenvalues (ascending) of a dense real symmetric n x n matrix stored
/// row-major. Only the upper triangle is read; `a` is destroyed.
std::vector<double> symmetric_eigenvalues(std::vector<double>& a, std::size_t n);

/// Eigenvalues (ascending) of a dense complex Hermitian n x n matrix stored
/// row-major. Only the upper triangle is read; `a` is destroyed.
std::vector<double> hermitian_eigenvalues(std::vector<std::complex<double>>& a, std::size_t n);

/// Pins the BLAS backend to one thread; campaign workers parallelize over
/// realizations instead.
void use_single_threaded_blas();

}  // namespace knn::linalg
