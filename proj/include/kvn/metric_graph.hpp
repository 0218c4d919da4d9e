#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "kvn/errors.hpp"
#include "kvn/forms.hpp"
#include "kvn/graph.hpp"
#include "kvn/linalg.hpp"
#include "kvn/matrix.hpp"
#include "kvn/semigroup.hpp"

namespace kvn {

/// A graph whose edges carry lengths (the weight field), each subdivided into
/// the same number of P1 cells. Coefficients are ordered vertices first, then
/// the interior nodes edge by edge, tail to head.
struct MetricGraph {
    WeightedOrientedGraph graph;
    std::size_t cells_per_edge;

    MetricGraph(WeightedOrientedGraph g, std::size_t m)
        : graph(std::move(g)), cells_per_edge(m) {
        if (m < 2) throw InvalidParams("metric graph needs at least 2 cells per edge");
    }

    std::size_t dof_count() const {
        return graph.vertex_count() + graph.edge_count() * (cells_per_edge - 1);
    }
};

/// Coupling imposed at the vertices on top of the edgewise Dirichlet energy.
struct VertexCondition {
    enum class Type {
        kirchhoff,  // continuity + flux balance (natural, no extra term)
        krein,      // subtract the conductance Laplacian of vertex values
        dirichlet,  // pin every vertex value to zero (edges decouple)
        custom,     // user-supplied symmetric coupling on the vertex space
    };
    Type type = Type::kirchhoff;
    SymMatrix coupling;  // custom only

    static VertexCondition kirchhoff() { return {Type::kirchhoff, SymMatrix()}; }
    static VertexCondition krein() { return {Type::krein, SymMatrix()}; }
    static VertexCondition dirichlet() { return {Type::dirichlet, SymMatrix()}; }
    static VertexCondition custom(SymMatrix lambda) {
        return {Type::custom, std::move(lambda)};
    }
};

/// P1 discretization of the quadratic form
///     a(u) = sum_e int_e |u'|^2 + (coupling * vertex values | vertex values),
/// on the chosen vertex condition. The krein coupling is minus the
/// conductance Laplacian (edge conductance 1/length), which makes every
/// edgewise affine interpolant an exact kernel vector on any mesh.
inline DiscretizedForm assemble(const MetricGraph& mg, const VertexCondition& condition,
                                bool lumped = false) {
    const std::size_t nv = mg.graph.vertex_count();
    const std::size_t ne = mg.graph.edge_count();
    const std::size_t m = mg.cells_per_edge;
    const std::size_t n_full = mg.dof_count();

    if (condition.type == VertexCondition::Type::custom && condition.coupling.order() != nv)
        throw ValidationError("custom coupling order must match the vertex count");

    auto node = [&](std::size_t e, std::size_t j) -> std::size_t {
        if (j == 0) return mg.graph.edges()[e].tail;
        if (j == m) return mg.graph.edges()[e].head;
        return nv + e * (m - 1) + (j - 1);
    };

    SymMatrix k_full(n_full), m_full(n_full);
    for (std::size_t e = 0; e < ne; ++e) {
        const double h = mg.graph.edges()[e].weight / static_cast<double>(m);
        for (std::size_t c = 0; c < m; ++c) {
            const std::size_t a = node(e, c), b = node(e, c + 1);
            k_full.add(a, a, 1.0 / h);
            k_full.add(b, b, 1.0 / h);
            k_full.add(a, b, -1.0 / h);
            if (lumped) {
                m_full.add(a, a, h / 2.0);
                m_full.add(b, b, h / 2.0);
            } else {
                m_full.add(a, a, h / 3.0);
                m_full.add(b, b, h / 3.0);
                m_full.add(a, b, h / 6.0);
            }
        }
    }

    if (condition.type == VertexCondition::Type::krein) {
        const SymMatrix lc = discrete_laplacian(mg.graph, LaplacianMode::conductance);
        for (std::size_t i = 0; i < nv; ++i)
            for (std::size_t j = i; j < nv; ++j) k_full.add(i, j, -lc(i, j));
    } else if (condition.type == VertexCondition::Type::custom) {
        for (std::size_t i = 0; i < nv; ++i)
            for (std::size_t j = i; j < nv; ++j) k_full.add(i, j, condition.coupling(i, j));
    }

    DiscretizedForm form;
    if (condition.type == VertexCondition::Type::dirichlet) {
        const std::size_t n = n_full - nv;
        form.stiffness = SymMatrix(n);
        form.mass = SymMatrix(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                form.stiffness.set(i, j, k_full(nv + i, nv + j));
                form.mass.set(i, j, m_full(nv + i, nv + j));
            }
        form.trace_map = Matrix(0, n);
    } else {
        form.stiffness = std::move(k_full);
        form.mass = std::move(m_full);
        form.trace_map = Matrix(nv, n_full);
        for (std::size_t v = 0; v < nv; ++v) form.trace_map(v, v) = 1.0;
        for (std::size_t v = 0; v < nv; ++v)
            form.dof_labels.push_back(mg.graph.vertex_names()[v]);
    }
    for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t j = 1; j < m; ++j)
            form.dof_labels.push_back("e" + std::to_string(e) + "." + std::to_string(j));
    return form;
}

/// Kernel dimension of the discretized pencil.
inline std::size_t kernel_dimension(const MetricGraph& mg, const VertexCondition& condition,
                                    double rel_tol = kKernelRelTolFem) {
    const DiscretizedForm form = assemble(mg, condition);
    return pencil_spectrum(form.stiffness, form.mass, rel_tol).kernel_dim;
}

struct PositivityProbe {
    bool violated = false;
    double t = 0.0;
    std::size_t row = 0;
    std::size_t col = 0;
    double entry = 0.0;
};

/// Evolves the lumped-mass semigroup at each listed time and reports the
/// first entrywise positivity violation, if any. The form must carry a
/// diagonal (lumped) mass.
inline PositivityProbe positivity_threshold_probe(const DiscretizedForm& form,
                                                  const std::vector<double>& times,
                                                  double tol = kSemigroupTolDefault) {
    const std::size_t n = form.mass.order();
    Vector diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && form.mass(i, j) != 0.0)
                throw InvalidParams("positivity probe needs a lumped (diagonal) mass");
        diag[i] = form.mass(i, i);
    }
    for (double t : times) {
        const SemigroupSample s = evolve(form.stiffness, diag, t);
        const PositivityReport rep = check_positivity(s, tol);
        if (!rep.positive) return {true, t, rep.row, rep.col, rep.min_entry};
    }
    return {};
}

struct RefinementReport {
    Vector coarse;  // eigenvalues at m cells per edge
    Vector mid;     // at 2m
    Vector fine;    // at 4m
    Vector orders;  // Richardson estimate per tracked eigenvalue
};

/// Richardson convergence-order estimate for the first k nonzero eigenvalues
/// under two uniform refinements. The kernel must be detected identically on
/// all three meshes; differences too small to divide reliably raise
/// DegenerateDifference.
inline RefinementReport refine_and_estimate_order(const MetricGraph& mg,
                                                  const VertexCondition& condition,
                                                  std::size_t k,
                                                  double rel_tol = kKernelRelTolFem) {
    RefinementReport rep;
    std::size_t kernel = 0;
    for (int level = 0; level < 3; ++level) {
        const std::size_t factor = static_cast<std::size_t>(1) << level;
        const MetricGraph refined(mg.graph, mg.cells_per_edge * factor);
        const DiscretizedForm form = assemble(refined, condition);
        const Spectrum spec = pencil_spectrum(form.stiffness, form.mass, rel_tol);
        if (level == 0)
            kernel = spec.kernel_dim;
        else if (spec.kernel_dim != kernel)
            throw KernelMismatch("kernel dimension changed under refinement");
        if (spec.values.size() < kernel + k)
            throw InvalidParams("mesh too coarse to track that many eigenvalues");
        Vector& dst = level == 0 ? rep.coarse : (level == 1 ? rep.mid : rep.fine);
        dst.assign(spec.values.begin() + static_cast<std::ptrdiff_t>(kernel),
                   spec.values.begin() + static_cast<std::ptrdiff_t>(kernel + k));
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double d1 = rep.coarse[j] - rep.mid[j];
        const double d2 = rep.mid[j] - rep.fine[j];
        if (std::abs(d2) < 1e-13 * std::max(1.0, std::abs(rep.fine[j])) || d1 * d2 <= 0.0)
            throw DegenerateDifference("refinement differences too small or non-monotone");
        rep.orders.push_back(std::log2(d1 / d2));
    }
    return rep;
}

}  // namespace kvn
