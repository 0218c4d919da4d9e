#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "kvn/errors.hpp"
#include "kvn/matrix.hpp"

namespace kvn {

/// Eigenvalues ascending; vectors(:,k) is the eigenvector for values[k],
/// orthonormal in the inner product the decomposition was computed against
/// (Euclidean for sym_eig, mass inner product for gen_sym_eig).
struct EigDecomposition {
    Vector values;
    Matrix vectors;
};

/// Ascending eigenvalue list with its eigenvector columns and the number of
/// leading entries classified as kernel.
struct Spectrum {
    Vector values;
    Matrix vectors;
    std::size_t kernel_dim = 0;
};

struct NullSpace {
    std::size_t dimension = 0;
    Matrix basis;  // orthonormal columns
};

/// Default relative threshold for deciding that an eigenvalue is zero.
inline constexpr double kKernelRelTolDefault = 1e-8;

/// Mesh-aware default used by FEM callers, where eigenvalue magnitudes span
/// several orders between the kernel and the top of the pencil spectrum.
inline constexpr double kKernelRelTolFem = 1e-6;

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

/// One cyclic Jacobi pass; rotations chosen per Golub & Van Loan sym. Schur.
inline void jacobi_sweep(Matrix& a, Matrix& v) {
    const std::size_t n = a.rows();
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double apq = a(p, q);
            if (apq == 0.0) continue;
            const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
            double t;
            if (theta >= 0.0)
                t = 1.0 / (theta + std::sqrt(1.0 + theta * theta));
            else
                t = -1.0 / (-theta + std::sqrt(1.0 + theta * theta));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            // A <- R^T A R with R rotating the (p,q) plane.
            for (std::size_t k = 0; k < n; ++k) {
                const double akp = a(k, p);
                const double akq = a(k, q);
                a(k, p) = c * akp - s * akq;
                a(k, q) = s * akp + c * akq;
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double apk = a(p, k);
                const double aqk = a(q, k);
                a(p, k) = c * apk - s * aqk;
                a(q, k) = s * apk + c * aqk;
            }
            a(p, q) = 0.0;
            a(q, p) = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double vkp = v(k, p);
                const double vkq = v(k, q);
                v(k, p) = c * vkp - s * vkq;
                v(k, q) = s * vkp + c * vkq;
            }
        }
    }
}

inline void sort_ascending(Vector& values, Matrix& vectors) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    Vector sorted(n);
    Matrix perm(vectors.rows(), n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = values[idx[k]];
        for (std::size_t i = 0; i < vectors.rows(); ++i) perm(i, k) = vectors(i, idx[k]);
    }
    values = std::move(sorted);
    vectors = std::move(perm);
}

}  // namespace detail

/// Cyclic Jacobi diagonalization. Deterministic, dependency-free, accurate to
/// machine precision for the dense orders this library targets (<= ~2000).
inline EigDecomposition sym_eig(const SymMatrix& a_in) {
    const std::size_t n = a_in.order();
    Matrix a = a_in.to_matrix();
    Matrix v = Matrix::identity(n);
    const double fro = a.frobenius_norm();
    if (fro > 0.0) {
        const double stop = 1e-15 * fro;
        const int max_sweeps = 100;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            if (detail::off_diagonal_norm(a) <= stop) break;
            detail::jacobi_sweep(a, v);
        }
    }
    Vector values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    detail::sort_ascending(values, v);
    return {std::move(values), std::move(v)};
}

/// Lower Cholesky factor of an SPD matrix. Throws NotPositiveDefinite when a
/// pivot fails, which is the SPD test used throughout.
inline Matrix cholesky_lower(const SymMatrix& m) {
    const std::size_t n = m.order();
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s))
                    throw NotPositiveDefinite("matrix is not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

namespace detail {

/// Solves L X = B in place of the returned matrix (forward substitution).
inline Matrix forward_solve_matrix(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, col);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
            x(i, col) = s / l(i, i);
        }
    }
    return x;
}

/// Solves L^T X = B (back substitution against the stored lower factor).
inline Matrix backward_solve_matrix(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x(ii, col);
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, col);
            x(ii, col) = s / l(ii, ii);
        }
    }
    return x;
}

}  // namespace detail

inline Vector cholesky_solve(const Matrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    Vector x = b;
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

/// Generalized symmetric eigenproblem K x = lambda M x with M SPD, reduced to
/// standard form through the Cholesky factor of M. Eigenvector columns are
/// M-orthonormal.
inline EigDecomposition gen_sym_eig(const SymMatrix& k, const SymMatrix& m) {
    if (k.order() != m.order()) throw ValidationError("pencil order mismatch");
    const Matrix l = cholesky_lower(m);
    // C = L^{-1} K L^{-T}, formed as L^{-1} (L^{-1} K)^T for symmetric K.
    Matrix w = detail::forward_solve_matrix(l, k.to_matrix());
    Matrix c = detail::forward_solve_matrix(l, w.transposed());
    EigDecomposition eig = sym_eig(SymMatrix(c));
    eig.vectors = detail::backward_solve_matrix(l, eig.vectors);
    return eig;
}

/// Spectral function application: E f(values) E^T. The result is exactly
/// symmetric by construction.
inline SymMatrix spectral_map(const SymMatrix& a, const std::function<double(double)>& f) {
    const EigDecomposition eig = sym_eig(a);
    const std::size_t n = a.order();
    Matrix scaled = eig.vectors;
    for (std::size_t j = 0; j < n; ++j) {
        const double fj = f(eig.values[j]);
        for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= fj;
    }
    return SymMatrix(scaled * eig.vectors.transposed());
}

/// Matrix exponential exp(t A) of a symmetric matrix via its eigensystem.
inline SymMatrix sym_exp(const SymMatrix& a, double t) {
    if (t == 0.0) return SymMatrix::identity(a.order());
    return spectral_map(a, [t](double lam) { return std::exp(t * lam); });
}

/// Counts eigenvalues classified as zero under a relative threshold, given the
/// full ascending eigenvalue list. The threshold is rel_tol * max(1, |lambda|_max).
/// Throws TolTooCoarse when any eigenvalue hugs the threshold: kernel candidates
/// must stay below thr / 20 and the rest above 2 * thr, so the classification is
/// stable under modest perturbations of the tolerance.
inline std::size_t count_kernel(const Vector& values_ascending, double rel_tol) {
    double lam_max = 0.0;
    for (double v : values_ascending) lam_max = std::max(lam_max, std::abs(v));
    const double thr = rel_tol * std::max(1.0, lam_max);
    std::size_t dim = 0;
    double inside = 0.0;  // largest |lambda| at or below thr
    double outside = std::numeric_limits<double>::infinity();
    for (double v : values_ascending) {
        const double m = std::abs(v);
        if (m <= thr) {
            ++dim;
            inside = std::max(inside, m);
        } else {
            outside = std::min(outside, m);
        }
    }
    if (inside > thr / 20.0 || outside < 2.0 * thr)
        throw TolTooCoarse("kernel threshold falls inside a spectral cluster; adjust the tolerance");
    return dim;
}

/// Orthonormal basis of the numerical null space of a symmetric matrix.
inline NullSpace null_space(const SymMatrix& a, double rel_tol = kKernelRelTolDefault) {
    EigDecomposition eig = sym_eig(a);
    const std::size_t dim = count_kernel(eig.values, rel_tol);
    std::vector<std::size_t> idx(dim);
    // Ascending order ranks by signed value; kernel entries are those of
    // smallest magnitude, located around the sign change.
    std::vector<std::size_t> order(eig.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return std::abs(eig.values[i]) < std::abs(eig.values[j]);
    });
    for (std::size_t k = 0; k < dim; ++k) idx[k] = order[k];
    std::sort(idx.begin(), idx.end());
    return {dim, eig.vectors.columns(idx)};
}

/// Kernel count plus full decomposition for a pencil; shared by the FEM-side
/// spectrum routines.
inline Spectrum pencil_spectrum(const SymMatrix& k, const SymMatrix& m, double rel_tol) {
    EigDecomposition eig = gen_sym_eig(k, m);
    const std::size_t dim = count_kernel(eig.values, rel_tol);
    return {std::move(eig.values), std::move(eig.vectors), dim};
}

}  // namespace kvn
