#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "kvn/errors.hpp"
#include "kvn/matrix.hpp"

namespace kvn {

struct Edge {
    std::size_t tail = 0;  // initial endpoint
    std::size_t head = 0;  // terminal endpoint
    double weight = 1.0;
};

/// Finite oriented graph with strictly positive edge weights. Invariants
/// enforced on construction: no self-loops, no parallel or anti-parallel
/// duplicate edges, no isolated vertices, weights positive and finite.
/// Vertex and edge indices follow input order.
class WeightedOrientedGraph {
  public:
    WeightedOrientedGraph(std::vector<std::string> vertex_names, std::vector<Edge> edges)
        : names_(std::move(vertex_names)), edges_(std::move(edges)) {
        validate();
    }

    std::size_t vertex_count() const { return names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::string>& vertex_names() const { return names_; }
    const std::vector<Edge>& edges() const { return edges_; }

  private:
    void validate() const {
        const std::size_t nv = names_.size();
        if (nv == 0) throw ValidationError("graph has no vertices");
        if (edges_.empty()) throw ValidationError("graph has no edges");
        std::map<std::string, std::size_t> seen;
        for (const auto& n : names_) {
            if (++seen[n] > 1) throw ValidationError("duplicate vertex name: " + n);
        }
        std::map<std::pair<std::size_t, std::size_t>, int> pairs;
        std::vector<int> touched(nv, 0);
        for (const Edge& e : edges_) {
            if (e.tail >= nv || e.head >= nv)
                throw ValidationError("edge endpoint out of range");
            if (e.tail == e.head)
                throw ValidationError("self-loop at vertex " + names_[e.tail]);
            if (!(e.weight > 0.0) || !std::isfinite(e.weight))
                throw ValidationError("edge weight must be positive and finite");
            const auto key = std::minmax(e.tail, e.head);
            if (++pairs[{key.first, key.second}] > 1)
                throw ValidationError("duplicate or anti-parallel edge between " +
                                      names_[e.tail] + " and " + names_[e.head]);
            touched[e.tail] = touched[e.head] = 1;
        }
        for (std::size_t v = 0; v < nv; ++v)
            if (!touched[v]) throw ValidationError("isolated vertex: " + names_[v]);
    }

    std::vector<std::string> names_;
    std::vector<Edge> edges_;
};

/// Signed incidence and its positive/negative parts. Column e of `signed_part`
/// carries +1 at the terminal (head) endpoint and -1 at the initial (tail)
/// endpoint; positive/negative parts split those two entries.
struct IncidenceMatrices {
    Matrix signed_part;    // |V| x |E|
    Matrix positive_part;  // head indicator
    Matrix negative_part;  // tail indicator
};

inline IncidenceMatrices incidence(const WeightedOrientedGraph& g) {
    const std::size_t nv = g.vertex_count();
    const std::size_t ne = g.edge_count();
    IncidenceMatrices inc{Matrix(nv, ne), Matrix(nv, ne), Matrix(nv, ne)};
    for (std::size_t e = 0; e < ne; ++e) {
        const Edge& ed = g.edges()[e];
        inc.positive_part(ed.head, e) = 1.0;
        inc.negative_part(ed.tail, e) = 1.0;
        inc.signed_part(ed.head, e) = 1.0;
        inc.signed_part(ed.tail, e) = -1.0;
    }
    return inc;
}

enum class LaplacianMode {
    resistance,   // weights enter directly: I diag(rho) I^T
    conductance,  // weights enter inverted: I diag(1/rho) I^T
};

/// Weighted graph Laplacian. Row sums vanish; the quadratic form is
/// sum_e w_e (f(head) - f(tail))^2 with w_e = rho_e or 1/rho_e by mode.
inline SymMatrix discrete_laplacian(const WeightedOrientedGraph& g, LaplacianMode mode) {
    const std::size_t nv = g.vertex_count();
    SymMatrix l(nv);
    for (const Edge& e : g.edges()) {
        const double w =
            mode == LaplacianMode::resistance ? e.weight : 1.0 / e.weight;
        l.add(e.tail, e.tail, w);
        l.add(e.head, e.head, w);
        l.add(e.tail, e.head, -w);
    }
    return l;
}

/// Weighted degree deg(v) = sum of weights of edges meeting v; equals the
/// diagonal of the resistance-mode Laplacian.
inline Vector degree(const WeightedOrientedGraph& g) {
    Vector d(g.vertex_count(), 0.0);
    for (const Edge& e : g.edges()) {
        d[e.tail] += e.weight;
        d[e.head] += e.weight;
    }
    return d;
}

inline std::size_t connected_components(const WeightedOrientedGraph& g) {
    const std::size_t nv = g.vertex_count();
    std::vector<std::vector<std::size_t>> adj(nv);
    for (const Edge& e : g.edges()) {
        adj[e.tail].push_back(e.head);
        adj[e.head].push_back(e.tail);
    }
    std::vector<int> seen(nv, 0);
    std::size_t components = 0;
    for (std::size_t start = 0; start < nv; ++start) {
        if (seen[start]) continue;
        ++components;
        std::queue<std::size_t> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop();
            for (std::size_t w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push(w);
                }
            }
        }
    }
    return components;
}

inline bool is_connected(const WeightedOrientedGraph& g) {
    return connected_components(g) == 1;
}

}  // namespace kvn
