#include "nbodylab/linalg.hpp"

#include <cmath>
#include <limits>

namespace nbodylab {

SymmetricEigen jacobi_eigen(const Matrix& sym) {
    const std::size_t n = sym.n;
    Matrix a = sym;
    Matrix v(n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-300) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i);
    out.eigenvectors = Matrix(n);

    // Sort ascending, permuting eigenvector columns alongside.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (out.eigenvalues[order[j]] < out.eigenvalues[order[i]]) std::swap(order[i], order[j]);
    std::vector<double> sorted(n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = out.eigenvalues[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    out.eigenvalues = std::move(sorted);
    return out;
}

bool lu_solve(Matrix a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = a.n;
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(best, col))) best = r;
        if (std::abs(a(best, col)) < 1e-300) return false;
        if (best != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a(col, k), a(best, k));
            std::swap(b[col], b[best]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            a(r, col) = 0.0;
            for (std::size_t k = col + 1; k < n; ++k) a(r, k) -= f * a(col, k);
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * x[k];
        x[i] = s / a(i, i);
    }
    return true;
}

std::vector<double> truncated_newton_step(const Matrix& sym_jacobian,
                                          const std::vector<double>& grad, double cutoff,
                                          double* condition_estimate) {
    const SymmetricEigen eig = jacobi_eigen(sym_jacobian);
    const std::size_t n = sym_jacobian.n;
    double max_abs = 0.0;
    for (double lam : eig.eigenvalues) max_abs = std::max(max_abs, std::abs(lam));
    double min_kept = std::numeric_limits<double>::infinity();
    std::vector<double> step(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = eig.eigenvalues[k];
        if (std::abs(lam) <= cutoff * max_abs) continue;
        min_kept = std::min(min_kept, std::abs(lam));
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += eig.eigenvectors(i, k) * grad[i];
        const double coef = -proj / lam;
        for (std::size_t i = 0; i < n; ++i) step[i] += coef * eig.eigenvectors(i, k);
    }
    if (condition_estimate)
        *condition_estimate = std::isfinite(min_kept) && min_kept > 0.0
                                  ? max_abs / min_kept
                                  : std::numeric_limits<double>::infinity();
    return step;
}

} // namespace nbodylab
