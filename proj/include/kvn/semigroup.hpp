#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "kvn/errors.hpp"
#include "kvn/linalg.hpp"
#include "kvn/matrix.hpp"

namespace kvn {

enum class SemigroupBasis {
    matrix_direct,  // exp(-tA) of a symmetric generator; matrix is symmetric
    fem_lumped,     // nodal-basis pencil semigroup; M-self-adjoint, not symmetric
};

struct SemigroupSample {
    double t = 0.0;
    Matrix matrix;
    SemigroupBasis basis = SemigroupBasis::matrix_direct;
};

/// exp(-t * generator) for a symmetric generator. t >= 0 only.
inline SemigroupSample evolve(const SymMatrix& generator, double t) {
    if (t < 0.0) throw NegativeTime("semigroup time must be nonnegative");
    return {t, sym_exp(generator, -t).to_matrix(), SemigroupBasis::matrix_direct};
}

/// Nodal-basis semigroup exp(-t M^{-1} K) for a lumped (diagonal, positive)
/// mass. Computed through the M-orthonormal eigenbasis of the pencil, so the
/// result is M-self-adjoint; in the nodal basis it is generally unsymmetric.
inline SemigroupSample evolve(const SymMatrix& stiffness, const Vector& lumped_mass, double t) {
    if (t < 0.0) throw NegativeTime("semigroup time must be nonnegative");
    const std::size_t n = stiffness.order();
    if (lumped_mass.size() != n) throw ValidationError("lumped mass size mismatch");
    Vector root(n), inv_root(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lumped_mass[i] > 0.0)) throw ValidationError("lumped mass must be positive");
        root[i] = std::sqrt(lumped_mass[i]);
        inv_root[i] = 1.0 / root[i];
    }
    // Similarity-transform to D^{-1/2} K D^{-1/2}; exponentiate; undo.
    SymMatrix b(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            b.set(i, j, stiffness(i, j) * inv_root[i] * inv_root[j]);
    const SymMatrix e = sym_exp(b, -t);
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = inv_root[i] * e(i, j) * root[j];
    return {t, std::move(s), SemigroupBasis::fem_lumped};
}

inline constexpr double kSemigroupTolDefault = 1e-8;  // absolute, entrywise

struct PositivityReport {
    bool positive = false;
    double min_entry = 0.0;
    std::size_t row = 0;
    std::size_t col = 0;
};

struct ContractivityReport {
    bool contractive = false;
    double max_row_sum = 0.0;  // largest l1 row norm
    std::size_t row = 0;
};

struct MarkovReport {
    bool markov = false;
    PositivityReport positivity;
    ContractivityReport contractivity;
    std::string reason;
};

/// Entrywise nonnegativity up to an absolute tolerance.
inline PositivityReport check_positivity(const SemigroupSample& s,
                                         double tol = kSemigroupTolDefault) {
    PositivityReport rep;
    rep.min_entry = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.matrix.rows(); ++i)
        for (std::size_t j = 0; j < s.matrix.cols(); ++j)
            if (s.matrix(i, j) < rep.min_entry) {
                rep.min_entry = s.matrix(i, j);
                rep.row = i;
                rep.col = j;
            }
    rep.positive = rep.min_entry >= -tol;
    return rep;
}

/// l-infinity contractivity: every absolute row sum at most 1 + tol.
inline ContractivityReport check_linf_contractivity(const SemigroupSample& s,
                                                    double tol = kSemigroupTolDefault) {
    ContractivityReport rep;
    for (std::size_t i = 0; i < s.matrix.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < s.matrix.cols(); ++j) sum += std::abs(s.matrix(i, j));
        if (sum > rep.max_row_sum) {
            rep.max_row_sum = sum;
            rep.row = i;
        }
    }
    rep.contractive = rep.max_row_sum <= 1.0 + tol;
    return rep;
}

/// Markov = positivity-preserving and l-infinity contractive.
inline MarkovReport check_markov(const SemigroupSample& s, double tol = kSemigroupTolDefault) {
    MarkovReport rep;
    rep.positivity = check_positivity(s, tol);
    rep.contractivity = check_linf_contractivity(s, tol);
    rep.markov = rep.positivity.positive && rep.contractivity.contractive;
    if (rep.markov) {
        rep.reason = "positive and contractive";
    } else if (!rep.positivity.positive) {
        rep.reason = "positivity violated: entry (" + std::to_string(rep.positivity.row) + "," +
                     std::to_string(rep.positivity.col) + ") = " +
                     std::to_string(rep.positivity.min_entry);
    } else {
        rep.reason = "row " + std::to_string(rep.contractivity.row) + " has l1 norm " +
                     std::to_string(rep.contractivity.max_row_sum);
    }
    return rep;
}

}  // namespace kvn
