// Acceptance gate: one line per criterion, exit status = number of failures.
// Every check is self-contained (graphs and oracles are built inline) so the
// binary can run from any directory.

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "kvn/forms.hpp"
#include "kvn/graph.hpp"
#include "kvn/interval.hpp"
#include "kvn/linalg.hpp"
#include "kvn/metric_graph.hpp"
#include "kvn/semigroup.hpp"
#include "kvn/wentzell.hpp"

namespace {

using kvn::DiscretizedForm;
using kvn::EigDecomposition;
using kvn::IntervalKind;
using kvn::IntervalOperatorSpec;
using kvn::Matrix;
using kvn::MetricGraph;
using kvn::Spectrum;
using kvn::SymMatrix;
using kvn::Vector;
using kvn::VertexCondition;
using kvn::WeightedOrientedGraph;

constexpr double kPi2 = 9.869604401089358;  // pi^2

WeightedOrientedGraph single_edge() { return {{"a", "b"}, {{0, 1, 1.0}}}; }

WeightedOrientedGraph path3() {
    return {{"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 0.5}}};
}

WeightedOrientedGraph star3() {
    return {{"c", "a", "b", "d"}, {{0, 1, 1.0}, {0, 2, 1.3}, {0, 3, 0.7}}};
}

WeightedOrientedGraph cycle4(const std::array<double, 4>& len) {
    return {{"v0", "v1", "v2", "v3"},
            {{0, 1, len[0]}, {1, 2, len[1]}, {2, 3, len[2]}, {3, 0, len[3]}}};
}

WeightedOrientedGraph k4() {
    return {{"v0", "v1", "v2", "v3"},
            {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}}};
}

bool close_scaled(double a, double ref, double rel) {
    return std::abs(a - ref) <= rel * std::max(1.0, std::abs(ref));
}

// exp(t*A) of the two-node difference form against its closed form, plus the
// positivity/contractivity verdicts on the t = 1 sample.
bool criterion_two_node_semigroup() {
    const SymMatrix a{{1.0, -1.0}, {-1.0, 1.0}};
    for (double t : {0.1, 1.0, 5.0}) {
        const SymMatrix e = kvn::sym_exp(a, t);
        const double g = std::exp(2.0 * t);
        const Matrix ref{{0.5 * (1.0 + g), 0.5 * (1.0 - g)},
                         {0.5 * (1.0 - g), 0.5 * (1.0 + g)}};
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                if (!close_scaled(e(i, j), ref(i, j), 1e-12)) return false;
    }
    const kvn::SemigroupSample s{1.0, kvn::sym_exp(a, 1.0).to_matrix(),
                                 kvn::SemigroupBasis::matrix_direct};
    if (kvn::check_positivity(s).positive) return false;
    const double row = kvn::check_linf_contractivity(s).max_row_sum;
    return std::abs(row - std::exp(2.0)) <= 1e-10;
}

// Soft kernel dimension = vertex count, natural kernel dimension = 1, on five
// graph shapes at mesh 64; the 4-cycle keeps dimension 4 for five distinct
// length vectors.
bool criterion_soft_kernel_dimension() {
    const double tol = 1e-6;
    const std::array<double, 4> base_len{1.0, 0.5, 1.5, 0.75};
    const WeightedOrientedGraph graphs[] = {single_edge(), path3(), star3(), cycle4(base_len),
                                            k4()};
    for (const auto& g : graphs) {
        const MetricGraph mg(g, 64);
        if (kvn::kernel_dimension(mg, VertexCondition::krein(), tol) != g.vertex_count())
            return false;
        if (kvn::kernel_dimension(mg, VertexCondition::kirchhoff(), tol) != 1) return false;
    }
    const std::array<double, 4> lengths[] = {{1.0, 1.0, 1.0, 1.0},
                                             {0.5, 1.0, 1.5, 2.0},
                                             {0.7, 1.3, 0.9, 1.1},
                                             {2.0, 0.5, 1.0, 0.8},
                                             {1.2, 1.4, 1.6, 1.8}};
    for (const auto& len : lengths) {
        const MetricGraph mg(cycle4(len), 64);
        if (kvn::kernel_dimension(mg, VertexCondition::krein(), tol) != 4) return false;
    }
    return true;
}

// Exact secular roots against closed forms, FEM agreement at mesh 64, and
// Richardson order of the first nonzero eigenvalue in [1.7, 2.3].
bool criterion_interval_spectra() {
    struct Case {
        IntervalOperatorSpec spec;
        std::vector<double> oracle;
        std::size_t kernel;
    };
    const Case cases[] = {
        {{IntervalKind::neumann, 0.0, 0}, {0.0, kPi2, 4.0 * kPi2}, 1},
        {{IntervalKind::dirichlet, 0.0, 0}, {kPi2, 4.0 * kPi2}, 0},
        {{IntervalKind::mixed, 0.0, 0}, {2.4674011002723408, 22.206609902451056}, 0},
        {{IntervalKind::krein, 0.0, 0}, {0.0, 0.0, 4.0 * kPi2, 80.762914225706496}, 2},
    };
    for (const Case& c : cases) {
        const auto roots = kvn::exact_spectrum(c.spec, c.oracle.size());
        for (const auto& r : roots)
            if (std::abs(r.residual) > 1e-12) return false;
        const Vector exact = kvn::eigenvalues(roots);
        if (exact.size() != c.oracle.size()) return false;
        for (std::size_t j = 0; j < exact.size(); ++j)
            if (!close_scaled(exact[j], c.oracle[j], 1e-9)) return false;

        std::array<double, 3> first_nonzero{};
        for (int level = 0; level < 3; ++level) {
            const std::size_t m = 16u << level;
            const DiscretizedForm form = kvn::assemble_interval(c.spec, m);
            const Spectrum spec =
                kvn::pencil_spectrum(form.stiffness, form.mass, kvn::kKernelRelTolFem);
            if (spec.kernel_dim != c.kernel) return false;
            if (m == 64) {
                for (std::size_t j = 0; j < c.oracle.size(); ++j) {
                    if (c.oracle[j] == 0.0) continue;  // covered by the kernel count
                    if (std::abs(spec.values[j] - c.oracle[j]) > 5e-3 * std::abs(c.oracle[j]))
                        return false;
                }
            }
            first_nonzero[level] = spec.values[c.kernel];
        }
        const double d1 = first_nonzero[0] - first_nonzero[1];
        const double d2 = first_nonzero[1] - first_nonzero[2];
        if (d1 * d2 <= 0.0) return false;
        const double order = std::log2(d1 / d2);
        if (order < 1.7 || order > 2.3) return false;
    }
    return true;
}

// Form ordering soft <= half-coupled <= natural, eigenvalue-wise, on three
// graphs; minimality probes (semigroup positivity and the epsilon pencils) all
// go strictly negative.
bool criterion_coupling_order_and_minimality() {
    // Exact discrete kernels (constants, or edgewise affines for the full
    // coupling) sit at machine zero, so a tight rel_tol keeps the kernel band
    // clear of the first resolved eigenvalue on every mesh used here.
    const auto spectrum_of = [](const MetricGraph& mg, const VertexCondition& cond) {
        const DiscretizedForm form = kvn::assemble(mg, cond);
        return kvn::pencil_spectrum(form.stiffness, form.mass, 1e-7);
    };
    for (const auto& g : {single_edge(), star3(), cycle4({1.0, 0.5, 1.5, 0.75})}) {
        const MetricGraph mg(g, 32);
        const SymMatrix lap =
            kvn::discrete_laplacian(g, kvn::LaplacianMode::conductance);
        const Spectrum soft = spectrum_of(mg, VertexCondition::custom(-1.0 * lap));
        const Spectrum half = spectrum_of(mg, VertexCondition::custom(-0.5 * lap));
        const Spectrum natural = spectrum_of(mg, VertexCondition::kirchhoff());
        for (std::size_t j = 0; j < 8; ++j) {
            const double slack = 1e-9 * std::max(1.0, std::abs(natural.values[j]));
            if (soft.values[j] > half.values[j] + slack) return false;
            if (half.values[j] > natural.values[j] + slack) return false;
        }
    }

    // The soft flow leaves the positive cone.
    const MetricGraph probe_graph(star3(), 16);
    const DiscretizedForm lumped =
        kvn::assemble(probe_graph, VertexCondition::krein(), /*lumped=*/true);
    const kvn::PositivityProbe probe =
        kvn::positivity_threshold_probe(lumped, {0.02, 0.1, 0.5});
    if (!probe.violated || probe.entry >= 0.0) return false;

    // Pushing the enlarged form below its bottom through the attached
    // coordinates goes indefinite for both enlargement routes.
    DiscretizedForm fr = kvn::assemble_interval({IntervalKind::robin, 1.0, 0}, 8);
    fr.mass.add(0, 0, 1.0);
    fr.mass.add(fr.mass.order() - 1, fr.mass.order() - 1, 1.0);
    Matrix selector(fr.stiffness.order() + 2, 2);
    selector(fr.stiffness.order(), 0) = 1.0;
    selector(fr.stiffness.order() + 1, 1) = 1.0;
    const kvn::KreinResult enlarged = kvn::krein_form(fr, selector);
    const kvn::KreinResult wentzell = kvn::assemble_wentzell_krein({1.0, 1.0}, 32);
    for (const kvn::KreinResult* kr : {&enlarged, &wentzell}) {
        const SymMatrix tto =
            kvn::congruence(kr->form.trace_map, SymMatrix::identity(kr->form.trace_map.rows()));
        for (double eps : {1e-3, 1e-2}) {
            const EigDecomposition eig =
                kvn::gen_sym_eig(kr->form.stiffness - eps * tto, kr->form.mass);
            if (!(eig.values.front() < -0.5 * eps)) return false;
        }
    }
    return true;
}

// Natural lumped flow is Markov at all sampled times; the soft flow fails
// positivity somewhere in the same sample, on both test graphs.
bool criterion_markov_dichotomy() {
    for (const auto& g : {single_edge(), star3()}) {
        const MetricGraph mg(g, 16);
        const DiscretizedForm natural =
            kvn::assemble(mg, VertexCondition::kirchhoff(), /*lumped=*/true);
        const DiscretizedForm soft =
            kvn::assemble(mg, VertexCondition::krein(), /*lumped=*/true);
        bool soft_violated = false;
        for (double t : {0.1, 0.5, 1.0}) {
            const auto nat_sample =
                kvn::evolve(natural.stiffness, natural.mass.diagonal_values(), t);
            if (!kvn::check_markov(nat_sample).markov) return false;
            const auto soft_sample =
                kvn::evolve(soft.stiffness, soft.mass.diagonal_values(), t);
            if (!kvn::check_positivity(soft_sample).positive) soft_violated = true;
        }
        if (!soft_violated) return false;
    }
    return true;
}

// lambda_j(-q) <= lambda_j(N) <= lambda_j(q) <= lambda_j(D) at q = 1 from the
// exact secular roots, and the q = -1 bottom eigenvalue is negative.
bool criterion_robin_chain() {
    const kvn::OrderingCheck chain = kvn::robin_ordering_check(1.0, 5);
    if (!chain.ordered) return false;
    const auto bottom = kvn::exact_spectrum({IntervalKind::robin, -1.0, 0}, 1);
    return bottom.front().lambda < 0.0;
}

// Royden splitting of 20 seeded random vectors: exact recomposition, harmonic
// part form-orthogonal to the zero-trace part in both variants.
bool criterion_royden_split() {
    const DiscretizedForm form = kvn::assemble_interval({IntervalKind::neumann, 0.0, 0}, 32);
    const std::size_t n = form.stiffness.order();
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vector u(n);
        for (double& x : u) x = dist(rng);
        const auto harm = kvn::royden_decompose(form, u, kvn::RoydenVariant::harmonic);
        const auto one = kvn::royden_decompose(form, u, kvn::RoydenVariant::one_harmonic);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(u[i] - harm.zero_trace[i] - harm.harmonic[i]) > 1e-12) return false;
            if (std::abs(u[i] - one.zero_trace[i] - one.harmonic[i]) > 1e-12) return false;
        }
        if (std::abs(kvn::dot(harm.zero_trace, form.stiffness * harm.harmonic)) > 1e-10)
            return false;
        const Vector a_one = form.stiffness * one.harmonic;
        const Vector m_one = form.mass * one.harmonic;
        double cross = kvn::dot(one.zero_trace, a_one) + kvn::dot(one.zero_trace, m_one);
        if (std::abs(cross) > 1e-10) return false;
    }
    return true;
}

// Boundary-coupled interval: hard operator strictly positive, soft kernel of
// dimension 2, sandwich and dominance orderings, all stable under doubling.
bool criterion_boundary_coupling() {
    for (double eta2 : {0.5, 1.0, 4.0}) {
        for (std::size_t m : {std::size_t{64}, std::size_t{128}}) {
            // eta2 = 0.5 puts the bottom eigenvalue at 0.33 while the pencil
            // top grows ~ 12 m^2, so the band test needs a tighter rel_tol.
            const kvn::WentzellComparison cmp =
                kvn::wentzell_compare({1.0, eta2}, m, 6, 1e-7);
            if (!(cmp.hard[0] > 0.0)) return false;
            if (cmp.kernel_dim != 2) return false;
            if (!cmp.ordered) return false;
        }
    }
    return true;
}

// The single-edge soft quantum graph and the soft interval operator are the
// same problem in different coordinates; the half-cell boundary response
// matrix has the exact integer stencil.
bool criterion_cross_validation() {
    const MetricGraph mg(single_edge(), 64);
    const DiscretizedForm qg = kvn::assemble(mg, VertexCondition::krein());
    const Spectrum qg_spec =
        kvn::pencil_spectrum(qg.stiffness, qg.mass, kvn::kKernelRelTolFem);
    const DiscretizedForm iv = kvn::assemble_interval({IntervalKind::krein, 0.0, 0}, 64);
    const Spectrum iv_spec =
        kvn::pencil_spectrum(iv.stiffness, iv.mass, kvn::kKernelRelTolFem);
    if (qg_spec.kernel_dim != 2 || iv_spec.kernel_dim != 2) return false;
    for (std::size_t j = 2; j < 6; ++j)
        if (std::abs(qg_spec.values[j] - iv_spec.values[j]) > 5e-3 * iv_spec.values[j])
            return false;
    const SymMatrix ref{{1.0, -1.0}, {-1.0, 1.0}};
    return (kvn::dtn_interval().to_matrix() - ref.to_matrix()).max_abs() == 0.0;
}

struct Criterion {
    const char* label;
    bool (*run)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"two-node semigroup closed form and markov verdicts", criterion_two_node_semigroup},
        {"soft kernel dimension equals vertex count", criterion_soft_kernel_dimension},
        {"interval spectra against exact secular roots", criterion_interval_spectra},
        {"coupling order and minimality probes", criterion_coupling_order_and_minimality},
        {"markov dichotomy of natural vs soft flows", criterion_markov_dichotomy},
        {"robin eigenvalue chain", criterion_robin_chain},
        {"royden splitting of random vectors", criterion_royden_split},
        {"boundary-coupled comparison stable under refinement", criterion_boundary_coupling},
        {"single-edge cross-validation and boundary response", criterion_cross_validation},
    };
    int failures = 0;
    int index = 1;
    for (const Criterion& c : criteria) {
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            std::fprintf(stderr, "criterion %d threw: %s\n", index, e.what());
        }
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", index, c.label);
        failures += ok ? 0 : 1;
        ++index;
    }
    return failures;
}
