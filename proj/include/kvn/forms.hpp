#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kvn/errors.hpp"
#include "kvn/linalg.hpp"
#include "kvn/matrix.hpp"

namespace kvn {

/// Galerkin data of a closed quadratic form: stiffness and SPD mass on the
/// coefficient space, plus a trace map whose rows evaluate boundary/vertex
/// values of a coefficient vector. trace_map may have zero rows.
struct DiscretizedForm {
    SymMatrix stiffness;
    SymMatrix mass;
    Matrix trace_map;
    std::vector<std::string> dof_labels;
};

/// Splitting of the enlarged space: columns of vf_basis span the embedded
/// Friedrichs domain, columns of n_basis span the attached complement, and
/// projector is the component map onto the former along the latter
/// (projector^2 = projector; no inner product involved).
struct KreinDecomposition {
    Matrix vf_basis;
    Matrix n_basis;
    Matrix projector;
};

struct KreinResult {
    DiscretizedForm form;
    KreinDecomposition decomposition;
};

namespace detail {

/// True when every trace row selects exactly one coefficient with weight 1.
inline bool selector_rows(const Matrix& t) {
    for (std::size_t i = 0; i < t.rows(); ++i) {
        std::size_t hits = 0;
        for (std::size_t j = 0; j < t.cols(); ++j) {
            const double v = t(i, j);
            if (v == 0.0) continue;
            if (v != 1.0) return false;
            ++hits;
        }
        if (hits != 1) return false;
    }
    return true;
}

/// Basis of ker(trace_map) as matrix columns. Fast path for selector rows;
/// otherwise the orthonormal kernel of T^T T.
inline Matrix zero_trace_basis(const Matrix& t) {
    const std::size_t n = t.cols();
    if (t.rows() == 0) return Matrix::identity(n);
    if (selector_rows(t)) {
        std::vector<int> traced(n, 0);
        for (std::size_t i = 0; i < t.rows(); ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (t(i, j) == 1.0) traced[j] = 1;
        std::size_t free_count = 0;
        for (int v : traced) free_count += v == 0;
        Matrix z(n, free_count);
        std::size_t col = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (!traced[j]) z(j, col++) = 1.0;
        return z;
    }
    const SymMatrix gram(t.transposed() * t);
    const NullSpace ns = null_space(gram, 1e-12);
    return ns.basis;
}

}  // namespace detail

/// Extension of a strictly positive form to the enlarged space spanned by the
/// embedded domain and an attached complement, with energy transported through
/// the component projector: the new stiffness evaluates the original form on
/// the projected component only, so the complement is exactly the kernel.
///
/// Conventions, fixed by this routine:
///  - the enlarged coordinates are (original coefficients, one extra
///    coordinate per trace row, carrying the decoupled boundary value);
///  - the domain embeds by u -> (u, trace u), i.e. vf_basis = [I; T];
///  - n_basis columns are written in the enlarged coordinates and must
///    complete the embedded domain to a direct sum (one column per trace row);
///  - the enlarged mass gives unit weight to each trace coordinate, so the
///    input mass must contain T^T T on top of the bulk mass.
///
/// An empty n_basis with no trace rows returns the input form unchanged
/// (identity projector).
inline KreinResult krein_form(const DiscretizedForm& friedrichs, const Matrix& n_basis,
                              double positivity_rel_tol = 1e-10) {
    const std::size_t nf = friedrichs.stiffness.order();
    if (friedrichs.mass.order() != nf || (friedrichs.trace_map.rows() > 0 &&
                                          friedrichs.trace_map.cols() != nf))
        throw ValidationError("inconsistent form dimensions");
    const std::size_t nt = friedrichs.trace_map.rows();

    // The operator restricted to its domain must be strictly positive for the
    // projector construction to produce a closed nonnegative form.
    {
        const EigDecomposition eig = gen_sym_eig(friedrichs.stiffness, friedrichs.mass);
        const double floor = positivity_rel_tol * std::max(1.0, std::abs(eig.values.back()));
        if (!(eig.values.front() > floor))
            throw NotStrictlyPositive("Friedrichs form is not strictly positive on its domain");
    }

    const std::size_t namb = nf + nt;
    if (static_cast<std::size_t>(n_basis.cols()) != nt ||
        (nt > 0 && n_basis.rows() != namb))
        throw RankDeficient("complement must supply exactly one vector per trace row");

    // J = [I; T] embeds the domain into the enlarged coordinates.
    Matrix j(namb, nf);
    for (std::size_t i = 0; i < nf; ++i) j(i, i) = 1.0;
    for (std::size_t r = 0; r < nt; ++r)
        for (std::size_t c = 0; c < nf; ++c) j(nf + r, c) = friedrichs.trace_map(r, c);

    KreinResult out;
    if (nt == 0) {
        out.form = friedrichs;
        out.decomposition = {j, Matrix(nf, 0), Matrix::identity(nf)};
        return out;
    }

    Matrix b = hstack(j, n_basis);
    Matrix binv;
    try {
        binv = lu_inverse(b);
    } catch (const RankDeficient&) {
        throw RankDeficient("complement does not form a direct sum with the embedded domain");
    }
    // Component coefficients: u = J c + (complement part), c = first nf rows
    // of B^{-1} u. The transported energy is c(u)^T K_F c(u).
    Matrix c(nf, namb);
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t k2 = 0; k2 < namb; ++k2) c(i, k2) = binv(i, k2);

    out.form.stiffness = congruence(c, friedrichs.stiffness);

    // Enlarged mass: bulk block keeps mass - T^T T (the coupled mass carried
    // one unit per trace row), each trace coordinate gets unit weight.
    Matrix m_amb(namb, namb);
    {
        const Matrix ttt = friedrichs.trace_map.transposed() * friedrichs.trace_map;
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t j2 = 0; j2 < nf; ++j2)
                m_amb(i, j2) = friedrichs.mass(i, j2) - ttt(i, j2);
        for (std::size_t r = 0; r < nt; ++r) m_amb(nf + r, nf + r) = 1.0;
    }
    out.form.mass = SymMatrix(m_amb);
    try {
        cholesky_lower(out.form.mass);
    } catch (const NotPositiveDefinite&) {
        throw ValidationError(
            "mass must contain the trace Gram T^T T on top of a positive bulk mass");
    }

    Matrix trace_out(nt, namb);
    for (std::size_t r = 0; r < nt; ++r) trace_out(r, nf + r) = 1.0;
    out.form.trace_map = std::move(trace_out);

    out.form.dof_labels = friedrichs.dof_labels;
    out.form.dof_labels.resize(nf);
    for (std::size_t r = 0; r < nt; ++r)
        out.form.dof_labels.push_back("trace" + std::to_string(r));

    out.decomposition.vf_basis = std::move(j);
    out.decomposition.n_basis = n_basis;
    out.decomposition.projector = out.decomposition.vf_basis * c;
    return out;
}

enum class RoydenVariant {
    harmonic,      // splitting against the energy form alone
    one_harmonic,  // splitting against energy + mass (the (1)-harmonic variant)
};

/// u = zero_trace + harmonic with the zero-trace part in ker(trace_map) and
/// the harmonic part form-orthogonal to every zero-trace vector. The harmonic
/// component solves the boundary-value problem with u's boundary data.
struct RoydenSplit {
    Vector zero_trace;
    Vector harmonic;
};

inline RoydenSplit royden_decompose(const DiscretizedForm& form, const Vector& u,
                                    RoydenVariant variant = RoydenVariant::harmonic) {
    const std::size_t n = form.stiffness.order();
    if (u.size() != n) throw ValidationError("vector length mismatch");
    if (form.trace_map.rows() == 0)
        throw ValidationError("royden_decompose needs a designated Dirichlet sub-domain");
    const Matrix z = detail::zero_trace_basis(form.trace_map);

    SymMatrix a = form.stiffness;
    if (variant == RoydenVariant::one_harmonic) a += form.mass;

    // Galerkin solve on the zero-trace subspace: (Z^T A Z) c = Z^T A u.
    const SymMatrix azz = congruence(z, a);
    const Vector au = a * u;
    Vector rhs(z.cols(), 0.0);
    for (std::size_t j = 0; j < z.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += z(i, j) * au[i];
        rhs[j] = s;
    }
    const Matrix l = cholesky_lower(azz);
    const Vector c = cholesky_solve(l, rhs);

    RoydenSplit split;
    split.zero_trace.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < z.cols(); ++j) s += z(i, j) * c[j];
        split.zero_trace[i] = s;
    }
    split.harmonic.resize(n);
    for (std::size_t i = 0; i < n; ++i) split.harmonic[i] = u[i] - split.zero_trace[i];
    return split;
}

/// Nonzero part of a pencil spectrum whose kernel dimension is known a priori.
/// The detected kernel (relative threshold rel_tol) must match, otherwise
/// KernelMismatch is thrown rather than silently dropping the wrong count.
inline Spectrum reduced_spectrum(const DiscretizedForm& form, std::size_t kernel_dim,
                                 double rel_tol = kKernelRelTolFem) {
    Spectrum full = pencil_spectrum(form.stiffness, form.mass, rel_tol);
    if (full.kernel_dim != kernel_dim)
        throw KernelMismatch("detected kernel dimension " + std::to_string(full.kernel_dim) +
                             ", expected " + std::to_string(kernel_dim));
    Spectrum reduced;
    reduced.kernel_dim = 0;
    reduced.values.assign(full.values.begin() + static_cast<std::ptrdiff_t>(kernel_dim),
                          full.values.end());
    std::vector<std::size_t> idx(full.values.size() - kernel_dim);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = kernel_dim + i;
    reduced.vectors = full.vectors.columns(idx);
    return reduced;
}

}  // namespace kvn
