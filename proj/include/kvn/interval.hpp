#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kvn/errors.hpp"
#include "kvn/forms.hpp"
#include "kvn/linalg.hpp"
#include "kvn/matrix.hpp"

namespace kvn {

/// Laplacian on (0,1) distinguished by its boundary condition.
enum class IntervalKind {
    neumann,    // u'(0) = u'(1) = 0
    dirichlet,  // u(0) = u(1) = 0
    mixed,      // Dirichlet at one end, Neumann at the other
    robin,      // outward derivative + q u = 0 at both ends
    krein,      // u'(0) = u'(1) = u(1) - u(0)
};

struct IntervalOperatorSpec {
    IntervalKind kind = IntervalKind::neumann;
    double q = 0.0;          // robin only
    int dirichlet_end = 0;   // mixed only: 0 or 1
};

enum class SecularBranch {
    zero,         // analytically known kernel
    oscillatory,  // lambda = mu^2, mu > 0
    hyperbolic,   // lambda = -kappa^2, kappa > 0
};

struct SecularRoot {
    SecularBranch branch = SecularBranch::oscillatory;
    double parameter = 0.0;  // mu or kappa; 0 for zero roots
    double lambda = 0.0;
    std::size_t multiplicity = 1;
    double residual = 0.0;  // normalized secular value at the root
};

namespace detail {

/// Secular function in normalized form (value stays O(1) near roots) together
/// with the raw value/derivative used for Newton steps.
struct SecularFn {
    std::function<double(double)> value;       // normalized
    std::function<double(double)> raw;         // same zeros
    std::function<double(double)> raw_deriv;
};

inline SecularFn oscillatory_secular(const IntervalOperatorSpec& spec) {
    switch (spec.kind) {
        case IntervalKind::neumann:
        case IntervalKind::dirichlet:
            return {[](double mu) { return std::sin(mu); },
                    [](double mu) { return std::sin(mu); },
                    [](double mu) { return std::cos(mu); }};
        case IntervalKind::mixed:
            return {[](double mu) { return std::cos(mu); },
                    [](double mu) { return std::cos(mu); },
                    [](double mu) { return -std::sin(mu); }};
        case IntervalKind::robin: {
            const double q = spec.q;
            return {[q](double mu) {
                        return ((q * q - mu * mu) * std::sin(mu) + 2.0 * q * mu * std::cos(mu)) /
                               (1.0 + q * q + mu * mu);
                    },
                    [q](double mu) {
                        return (q * q - mu * mu) * std::sin(mu) + 2.0 * q * mu * std::cos(mu);
                    },
                    [q](double mu) {
                        return (q * q - mu * mu + 2.0 * q) * std::cos(mu) -
                               2.0 * mu * (1.0 + q) * std::sin(mu);
                    }};
        }
        case IntervalKind::krein:
            // vanishing determinant of the two coupling conditions:
            // 2 - 2 cos(mu) - mu sin(mu) = 0
            return {[](double mu) { return (2.0 - 2.0 * std::cos(mu) - mu * std::sin(mu)) / (1.0 + mu); },
                    [](double mu) { return 2.0 - 2.0 * std::cos(mu) - mu * std::sin(mu); },
                    [](double mu) { return std::sin(mu) - mu * std::cos(mu); }};
    }
    throw InvalidParams("unknown interval kind");
}

/// Hyperbolic branch for robin with q < 0. The secular value factors through
/// half-angle functions,
///   (q^2 + k^2) sinh k + 2 q k cosh k
///       = 2 (q cosh(k/2) + k sinh(k/2)) (k cosh(k/2) + q sinh(k/2)),
/// and the factors are scanned separately: their roots stay well apart even
/// when the eigenvalue pair they produce is exponentially close (deep wells
/// at both ends). Each factor is written in tanh form so it never overflows.
inline SecularFn hyperbolic_factor(double q, bool first) {
    if (first)
        return {[q](double k) { return (q + k * std::tanh(0.5 * k)) / (1.0 - q + k); },
                [q](double k) { return q + k * std::tanh(0.5 * k); },
                [](double k) {
                    const double th = std::tanh(0.5 * k);
                    return th + 0.5 * k * (1.0 - th * th);
                }};
    return {[q](double k) { return (k + q * std::tanh(0.5 * k)) / (1.0 - q + k); },
            [q](double k) { return k + q * std::tanh(0.5 * k); },
            [q](double k) {
                const double th = std::tanh(0.5 * k);
                return 1.0 + 0.5 * q * (1.0 - th * th);
            }};
}

/// Bracketed bisection followed by safeguarded Newton polish.
inline double polish_root(const SecularFn& f, double lo, double hi) {
    double flo = f.raw(lo);
    double x = 0.5 * (lo + hi);
    // bisect to a narrow bracket first
    for (int it = 0; it < 80 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
        x = 0.5 * (lo + hi);
        const double fx = f.raw(x);
        if (fx == 0.0) break;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
    }
    // Newton, falling back to bisection when a step leaves the bracket
    for (int it = 0; it < 60; ++it) {
        const double fx = f.raw(x);
        const double dfx = f.raw_deriv(x);
        double next = dfx != 0.0 ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double fn = f.raw(next);
        if ((fn > 0.0) == (flo > 0.0)) {
            lo = next;
            flo = fn;
        } else {
            hi = next;
        }
        if (std::abs(next - x) <= 1e-16 * (1.0 + std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

/// All roots of f on (lo_excl, hi] found by sign scanning with the given step.
inline std::vector<double> scan_and_polish(const SecularFn& f, double lo_excl, double hi,
                                           double step) {
    std::vector<double> roots;
    double x_prev = lo_excl;
    double f_prev = f.raw(x_prev);
    const std::size_t cells = static_cast<std::size_t>(std::ceil((hi - lo_excl) / step));
    for (std::size_t i = 1; i <= cells; ++i) {
        const double x = std::min(lo_excl + static_cast<double>(i) * step, hi);
        const double fx = f.raw(x);
        if (f_prev != 0.0 && fx != 0.0 && (f_prev > 0.0) != (fx > 0.0))
            roots.push_back(polish_root(f, x_prev, x));
        else if (fx == 0.0)
            roots.push_back(x);
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

}  // namespace detail

inline void validate(const IntervalOperatorSpec& spec) {
    if (spec.kind == IntervalKind::robin && !std::isfinite(spec.q))
        throw InvalidParams("robin parameter must be finite");
    if (spec.kind == IntervalKind::mixed && spec.dirichlet_end != 0 && spec.dirichlet_end != 1)
        throw InvalidParams("mixed kind needs dirichlet_end 0 or 1");
}

/// First k eigenvalues (counted with multiplicity) of the chosen interval
/// operator, through analytic kernels plus bracketed secular roots. Roots are
/// strictly increasing in lambda; the last root's multiplicity is clipped so
/// the total count equals k.
inline std::vector<SecularRoot> exact_spectrum(const IntervalOperatorSpec& spec, std::size_t k) {
    validate(spec);
    if (k == 0) return {};
    const double pi = std::acos(-1.0);
    std::vector<SecularRoot> out;

    // Analytic zero eigenvalues: constants (neumann, robin q=0), the affine
    // functions (krein, dimension 2), and the affine kernel at robin q=-2.
    if (spec.kind == IntervalKind::neumann)
        out.push_back({SecularBranch::zero, 0.0, 0.0, 1, 0.0});
    else if (spec.kind == IntervalKind::krein)
        out.push_back({SecularBranch::zero, 0.0, 0.0, 2, 0.0});
    else if (spec.kind == IntervalKind::robin && (spec.q == 0.0 || spec.q == -2.0))
        out.push_back({SecularBranch::zero, 0.0, 0.0, 1, 0.0});

    if (spec.kind == IntervalKind::robin && spec.q < 0.0) {
        const double window = 4.0 + 2.0 * std::abs(spec.q);
        for (bool first : {true, false}) {
            const auto fn = detail::hyperbolic_factor(spec.q, first);
            for (double kp : detail::scan_and_polish(fn, 1e-9, window, pi / 16.0)) {
                // the second factor behaves like k^3/12 near 0 when q is close
                // to -2; genuine roots are O(1), noise stays below 1e-4
                if (kp < 1e-4) continue;
                out.push_back(
                    {SecularBranch::hyperbolic, kp, -kp * kp, 1, std::abs(fn.value(kp))});
            }
        }
    }

    const auto fn = detail::oscillatory_secular(spec);
    auto have = [&out]() {
        std::size_t m = 0;
        for (const auto& r : out) m += r.multiplicity;
        return m;
    };
    // Near mu = 0 the secular value is dominated by rounding noise whenever
    // its leading term is quartic (krein: mu^4/12) or cubic (robin at the
    // degenerate couplings q = 0 and q = -2). The kernel there is emitted
    // analytically above, so roots below the noise floor are discarded.
    double mu_floor = 1e-6;
    if (spec.kind == IntervalKind::krein ||
        (spec.kind == IntervalKind::robin && std::abs(spec.q * (spec.q + 2.0)) <= 1e-8))
        mu_floor = 1e-3;
    double lo = 1e-9;
    double window = (static_cast<double>(k) + 3.0) * pi;
    while (true) {
        const auto mus = detail::scan_and_polish(fn, lo, window, pi / 16.0);
        for (double mu : mus) {
            // analytic zeros are emitted separately; drop stray tiny roots
            if (mu < mu_floor) continue;
            if (!out.empty() && out.back().branch == SecularBranch::oscillatory &&
                std::abs(out.back().parameter - mu) <= 1e-9 * (1.0 + mu))
                continue;
            out.push_back({SecularBranch::oscillatory, mu, mu * mu, 1, std::abs(fn.value(mu))});
        }
        if (have() >= k) break;
        lo = window;
        window *= 2.0;
        if (window > 1e6)
            throw RootBracketFailure("could not bracket enough secular roots");
    }

    // trim to exactly k eigenvalues counted with multiplicity
    std::stable_sort(out.begin(), out.end(),
                     [](const SecularRoot& a, const SecularRoot& b) { return a.lambda < b.lambda; });
    std::vector<SecularRoot> trimmed;
    std::size_t total = 0;
    for (const auto& r : out) {
        if (total >= k) break;
        SecularRoot c = r;
        c.multiplicity = std::min(c.multiplicity, k - total);
        total += c.multiplicity;
        trimmed.push_back(c);
    }
    return trimmed;
}

/// Flattened eigenvalue list (multiplicities expanded), ascending.
inline Vector eigenvalues(const std::vector<SecularRoot>& roots) {
    Vector v;
    for (const auto& r : roots)
        for (std::size_t i = 0; i < r.multiplicity; ++i) v.push_back(r.lambda);
    return v;
}

struct OrderingCheck {
    bool ordered = true;
    Vector margins;  // per adjacent comparison, >= 0 expected
};

/// Operator-order chain on the interval for q > 0:
/// robin(-q) <= neumann <= robin(q) <= dirichlet, eigenvalue-wise for j <= k.
inline OrderingCheck robin_ordering_check(double q, std::size_t k) {
    if (!(q > 0.0)) throw InvalidParams("robin_ordering_check needs q > 0");
    const Vector neg = eigenvalues(exact_spectrum({IntervalKind::robin, -q, 0}, k));
    const Vector neu = eigenvalues(exact_spectrum({IntervalKind::neumann, 0.0, 0}, k));
    const Vector pos = eigenvalues(exact_spectrum({IntervalKind::robin, q, 0}, k));
    const Vector dir = eigenvalues(exact_spectrum({IntervalKind::dirichlet, 0.0, 0}, k));
    OrderingCheck chk;
    for (std::size_t j = 0; j < k; ++j) {
        for (const double m : {neu[j] - neg[j], pos[j] - neu[j], dir[j] - pos[j]}) {
            chk.margins.push_back(m);
            if (m < -1e-12 * std::max(1.0, std::abs(dir[j]))) chk.ordered = false;
        }
    }
    return chk;
}

/// Dirichlet-to-Neumann map of (0,1): boundary data -> outward derivative of
/// its harmonic (affine) extension, in the (f(0), f(1)) coordinates. Positive
/// semidefinite sign convention: the associated energy (DtN f | f) equals the
/// Dirichlet energy of the extension.
inline SymMatrix dtn_interval() {
    SymMatrix dtn(2);
    for (std::size_t col = 0; col < 2; ++col) {
        const double f0 = col == 0 ? 1.0 : 0.0;
        const double f1 = col == 1 ? 1.0 : 0.0;
        const double slope = f1 - f0;       // affine extension u = f0 + slope*x
        dtn.set(0, col, -slope);            // outward derivative at 0 is -u'
        dtn.set(1, col, slope);             // outward derivative at 1 is +u'
    }
    return dtn;
}

/// P1 discretization of the chosen interval operator on m cells. Dirichlet
/// ends are eliminated; robin adds q to the end diagonals; krein subtracts the
/// two-point difference form on the traces. trace_map rows select the free
/// (non-Dirichlet) endpoints.
inline DiscretizedForm assemble_interval(const IntervalOperatorSpec& spec, std::size_t m,
                                         bool lumped = false) {
    validate(spec);
    if (m < 2) throw InvalidParams("interval mesh needs at least 2 cells");
    const double h = 1.0 / static_cast<double>(m);
    SymMatrix k_full(m + 1), m_full(m + 1);
    for (std::size_t c = 0; c < m; ++c) {
        k_full.add(c, c, 1.0 / h);
        k_full.add(c + 1, c + 1, 1.0 / h);
        k_full.add(c, c + 1, -1.0 / h);
        if (lumped) {
            m_full.add(c, c, h / 2.0);
            m_full.add(c + 1, c + 1, h / 2.0);
        } else {
            m_full.add(c, c, h / 3.0);
            m_full.add(c + 1, c + 1, h / 3.0);
            m_full.add(c, c + 1, h / 6.0);
        }
    }
    if (spec.kind == IntervalKind::robin) {
        k_full.add(0, 0, spec.q);
        k_full.add(m, m, spec.q);
    } else if (spec.kind == IntervalKind::krein) {
        k_full.add(0, 0, -1.0);
        k_full.add(m, m, -1.0);
        k_full.add(0, m, 1.0);
    }

    std::vector<std::size_t> keep;
    std::vector<std::size_t> trace_nodes;
    const bool drop0 = spec.kind == IntervalKind::dirichlet ||
                       (spec.kind == IntervalKind::mixed && spec.dirichlet_end == 0);
    const bool drop1 = spec.kind == IntervalKind::dirichlet ||
                       (spec.kind == IntervalKind::mixed && spec.dirichlet_end == 1);
    for (std::size_t i = 0; i <= m; ++i) {
        if (i == 0 && drop0) continue;
        if (i == m && drop1) continue;
        keep.push_back(i);
    }
    DiscretizedForm form;
    form.stiffness = SymMatrix(keep.size());
    form.mass = SymMatrix(keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = a; b < keep.size(); ++b) {
            form.stiffness.set(a, b, k_full(keep[a], keep[b]));
            form.mass.set(a, b, m_full(keep[a], keep[b]));
        }
    for (std::size_t a = 0; a < keep.size(); ++a) {
        if (keep[a] == 0 && !drop0) trace_nodes.push_back(a);
        if (keep[a] == m && !drop1) trace_nodes.push_back(a);
        form.dof_labels.push_back("n" + std::to_string(keep[a]));
    }
    form.trace_map = Matrix(trace_nodes.size(), keep.size());
    for (std::size_t r = 0; r < trace_nodes.size(); ++r)
        form.trace_map(r, trace_nodes[r]) = 1.0;
    return form;
}

}  // namespace kvn
