#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kvn/errors.hpp"
#include "kvn/forms.hpp"
#include "kvn/interval.hpp"
#include "kvn/linalg.hpp"
#include "kvn/matrix.hpp"

namespace kvn {

/// Interval Laplacian with boundary coupling of Wentzell type: the endpoint
/// values are dynamic unknowns carrying one unit of boundary mass each, and
/// eta2 > 0 couples them to the bulk through the energy
///     a(u) = int |u'|^2 + eta2 (u(0)^2 + u(1)^2).
/// eta1 scales nothing here: the boundary mass is normalized to one unit per
/// endpoint; the field is accepted for interface stability and must be
/// nonnegative and finite.
struct WentzellParams {
    double eta1 = 1.0;
    double eta2 = 1.0;
};

inline void validate(const WentzellParams& p, std::size_t m) {
    if (!(p.eta1 >= 0.0) || !std::isfinite(p.eta1))
        throw InvalidParams("eta1 must be nonnegative and finite");
    if (!(p.eta2 > 0.0) || !std::isfinite(p.eta2))
        throw InvalidParams("eta2 must be positive and finite");
    if (m < 8) throw InvalidParams("wentzell discretization needs at least 8 cells");
}

/// Hard (Friedrichs) discretization: P1 bulk, eta2 on the end diagonals of
/// the stiffness, one unit of boundary mass per endpoint, end-selector trace.
/// The resulting pencil is strictly positive.
inline DiscretizedForm assemble_wentzell_friedrichs(const WentzellParams& p, std::size_t m) {
    validate(p, m);
    DiscretizedForm form = assemble_interval({IntervalKind::robin, p.eta2, 0}, m);
    form.mass.add(0, 0, 1.0);
    form.mass.add(m, m, 1.0);
    return form;
}

/// Soft (Krein-von Neumann) counterpart on the enlarged space in which the
/// two endpoint values decouple from the bulk trace. The attached complement
/// is the kernel of the maximal operator
///     (u, b) |-> (-u'', normal derivative + eta2 b),
/// spanned by (1; 0, 0) and (x; 1/eta2, -1/eta2); both interpolate exactly,
/// so the enlarged kernel has dimension 2 on every mesh.
inline KreinResult assemble_wentzell_krein(const WentzellParams& p, std::size_t m) {
    validate(p, m);
    const DiscretizedForm hard = assemble_wentzell_friedrichs(p, m);
    const std::size_t nf = hard.stiffness.order();
    Matrix n(nf + 2, 2);
    for (std::size_t i = 0; i <= m; ++i) {
        n(i, 0) = 1.0;
        n(i, 1) = static_cast<double>(i) / static_cast<double>(m);
    }
    n(nf, 1) = 1.0 / p.eta2;
    n(nf + 1, 1) = -1.0 / p.eta2;
    return krein_form(hard, n);
}

struct WentzellComparison {
    Vector hard;               // Friedrichs eigenvalues
    Vector soft;               // enlarged-pencil eigenvalues (kernel included)
    Vector reduced;            // soft spectrum with the kernel removed
    Vector soft_margins;       // hard[j] - soft[j]          (expected >= 0)
    Vector dominance_margins;  // reduced[j] - hard[j]       (expected >= 0)
    std::size_t kernel_dim = 0;
    bool ordered = true;
};

/// Index-by-index comparison of the two extensions on matching meshes: the
/// soft eigenvalue list (its kernel zeros included) sits below the hard one,
/// while the reduced soft list dominates it. Both follow from min-max through
/// the isometric embedding of the hard form domain.
inline WentzellComparison wentzell_compare(const WentzellParams& p, std::size_t m,
                                           std::size_t k, double rel_tol = kKernelRelTolFem) {
    const DiscretizedForm hard = assemble_wentzell_friedrichs(p, m);
    const KreinResult soft = assemble_wentzell_krein(p, m);
    const Spectrum sh = pencil_spectrum(hard.stiffness, hard.mass, rel_tol);
    const Spectrum ss = pencil_spectrum(soft.form.stiffness, soft.form.mass, rel_tol);
    if (k + ss.kernel_dim > sh.values.size())
        throw InvalidParams("mesh too coarse to compare that many eigenvalues");

    WentzellComparison cmp;
    cmp.kernel_dim = ss.kernel_dim;
    cmp.hard.assign(sh.values.begin(), sh.values.begin() + static_cast<std::ptrdiff_t>(k));
    cmp.soft.assign(ss.values.begin(), ss.values.begin() + static_cast<std::ptrdiff_t>(k));
    cmp.reduced.assign(ss.values.begin() + static_cast<std::ptrdiff_t>(ss.kernel_dim),
                       ss.values.begin() + static_cast<std::ptrdiff_t>(ss.kernel_dim + k));
    for (std::size_t j = 0; j < k; ++j) {
        cmp.soft_margins.push_back(cmp.hard[j] - cmp.soft[j]);
        cmp.dominance_margins.push_back(cmp.reduced[j] - cmp.hard[j]);
        const double floor = -1e-10 * (1.0 + std::abs(cmp.hard[j]));
        if (cmp.soft_margins.back() < floor || cmp.dominance_margins.back() < floor)
            cmp.ordered = false;
    }
    return cmp;
}

}  // namespace kvn
