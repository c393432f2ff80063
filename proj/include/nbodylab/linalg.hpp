#ifndef NBODYLAB_LINALG_HPP
#define NBODYLAB_LINALG_HPP

#include <cstddef>
#include <vector>

namespace nbodylab {

/// Dense row-major n x n matrix, just enough for the small solver problems
/// here (3N coordinates with N <= a dozen).
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// eigenvalues come out ascending; eigenvectors(i,k) is component i of the
/// k-th eigenvector.
struct SymmetricEigen {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

SymmetricEigen jacobi_eigen(const Matrix& sym);

/// Solves A x = b by LU with partial pivoting. Returns false when the matrix
/// is numerically singular.
bool lu_solve(Matrix a, std::vector<double> b, std::vector<double>& x);

/// Minimum-norm solution of the symmetric system A x = -g with eigenvalues of
/// magnitude below cutoff * max|eig| treated as zero. Used for Newton steps on
/// gradient systems whose Jacobian has a rotational kernel.
std::vector<double> truncated_newton_step(const Matrix& sym_jacobian,
                                          const std::vector<double>& grad, double cutoff,
                                          double* condition_estimate = nullptr);

} // namespace nbodylab

#endif
