#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "kvn/graph.hpp"
#include "kvn/graph_io.hpp"
#include "kvn/linalg.hpp"
#include "oracles.hpp"

using kvn::Edge;
using kvn::LaplacianMode;
using kvn::Matrix;
using kvn::SymMatrix;
using kvn::Vector;
using kvn::WeightedOrientedGraph;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    const auto dir = std::filesystem::temp_directory_path() / "kvn_graph_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path);
    out << body;
    return path;
}

/// Random graph with `components` connected pieces, each a tree of >= 2
/// vertices plus a few chords; never violates the construction invariants.
WeightedOrientedGraph random_graph(unsigned seed, std::size_t components = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> wdist(0.1, 3.0);
    std::vector<std::string> names;
    std::vector<Edge> edges;
    std::set<std::pair<std::size_t, std::size_t>> used;
    std::size_t base = 0;
    for (std::size_t c = 0; c < components; ++c) {
        const std::size_t nv = 2 + rng() % 3;  // 2..4 vertices per component
        for (std::size_t v = 0; v < nv; ++v)
            names.push_back("c" + std::to_string(c) + "v" + std::to_string(v));
        for (std::size_t v = 1; v < nv; ++v) {
            const std::size_t u = base + rng() % v;
            const std::size_t w = base + v;
            const bool flip = rng() % 2;
            edges.push_back({flip ? w : u, flip ? u : w, wdist(rng)});
            used.insert(std::minmax(u, w));
        }
        // up to two chords
        for (int extra = 0; extra < 2; ++extra) {
            const std::size_t u = base + rng() % nv;
            const std::size_t w = base + rng() % nv;
            if (u == w || used.count(std::minmax(u, w))) continue;
            edges.push_back({u, w, wdist(rng)});
            used.insert(std::minmax(u, w));
        }
        base += nv;
    }
    return WeightedOrientedGraph(std::move(names), std::move(edges));
}

}  // namespace

TEST_CASE("load_graph accepts the documented schema", "[graph]") {
    const auto path = write_temp("p2.json", R"({
        "vertices": ["a", "b"],
        "edges": [ {"tail": "a", "head": "b", "weight": 0.37512986243} ]
    })");
    const auto g = kvn::load_graph(path.string());
    REQUIRE(g.vertex_count() == 2);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.vertex_names()[0] == "a");  // file order kept
    CHECK(g.edges()[0].tail == 0);
    CHECK(g.edges()[0].head == 1);
    CHECK(g.edges()[0].weight == 0.37512986243);  // exact round-trip

    const auto defaulted = write_temp("p2_default.json", R"({
        "vertices": ["a", "b"],
        "edges": [ {"tail": "a", "head": "b"} ]
    })");
    CHECK(kvn::load_graph(defaulted.string()).edges()[0].weight == 1.0);
}

TEST_CASE("load_graph rejects malformed and invalid inputs", "[graph]") {
    CHECK_THROWS_AS(kvn::load_graph("/nonexistent/graph.json"), kvn::ParseError);

    const auto bad_json = write_temp("bad.json", "{ not json");
    CHECK_THROWS_AS(kvn::load_graph(bad_json.string()), kvn::ParseError);

    const auto unknown_key = write_temp("unknown.json",
        R"({"vertices": ["a","b"], "edges": [{"tail":"a","head":"b"}], "extra": 1})");
    CHECK_THROWS_AS(kvn::load_graph(unknown_key.string()), kvn::ParseError);

    const auto unknown_edge_key = write_temp("unknown_edge.json",
        R"({"vertices": ["a","b"], "edges": [{"tail":"a","head":"b","w":2}]})");
    CHECK_THROWS_AS(kvn::load_graph(unknown_edge_key.string()), kvn::ParseError);

    const auto self_loop = write_temp("self.json",
        R"({"vertices": ["a","b"], "edges": [{"tail":"a","head":"a"},{"tail":"a","head":"b"}]})");
    CHECK_THROWS_AS(kvn::load_graph(self_loop.string()), kvn::ValidationError);

    const auto anti_parallel = write_temp("anti.json",
        R"({"vertices": ["a","b"],
            "edges": [{"tail":"a","head":"b"},{"tail":"b","head":"a"}]})");
    CHECK_THROWS_AS(kvn::load_graph(anti_parallel.string()), kvn::ValidationError);

    const auto isolated = write_temp("isolated.json",
        R"({"vertices": ["a","b","c"], "edges": [{"tail":"a","head":"b"}]})");
    CHECK_THROWS_AS(kvn::load_graph(isolated.string()), kvn::ValidationError);

    const auto nonpositive = write_temp("nonpos.json",
        R"({"vertices": ["a","b"], "edges": [{"tail":"a","head":"b","weight":0}]})");
    CHECK_THROWS_AS(kvn::load_graph(nonpositive.string()), kvn::ValidationError);

    const auto unknown_vertex = write_temp("unknown_vertex.json",
        R"({"vertices": ["a","b"], "edges": [{"tail":"a","head":"z"}]})");
    CHECK_THROWS_AS(kvn::load_graph(unknown_vertex.string()), kvn::ValidationError);

    const auto dup_vertex = write_temp("dup_vertex.json",
        R"({"vertices": ["a","a"], "edges": [{"tail":"a","head":"a"}]})");
    CHECK_THROWS_AS(kvn::load_graph(dup_vertex.string()), kvn::ValidationError);
}

TEST_CASE("incidence carries +1 at the head and -1 at the tail", "[graph]") {
    // path a -> b -> c
    const WeightedOrientedGraph g({"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 1.0}});
    const auto inc = kvn::incidence(g);
    CHECK(inc.signed_part(0, 0) == -1.0);
    CHECK(inc.signed_part(1, 0) == 1.0);
    CHECK(inc.signed_part(1, 1) == -1.0);
    CHECK(inc.signed_part(2, 1) == 1.0);
    for (std::size_t e = 0; e < 2; ++e) {
        double sum = 0.0, abs_sum = 0.0;
        for (std::size_t v = 0; v < 3; ++v) {
            sum += inc.signed_part(v, e);
            abs_sum += std::abs(inc.signed_part(v, e));
        }
        CHECK(sum == 0.0);       // one +1 and one -1 per column
        CHECK(abs_sum == 2.0);
    }
    const Matrix diff = inc.signed_part - (inc.positive_part - inc.negative_part);
    CHECK(diff.max_abs() == 0.0);
}

TEST_CASE("stacked endpoint indicators have full column rank", "[graph]") {
    for (unsigned seed : {11u, 12u, 13u}) {
        const auto g = random_graph(seed);
        const auto inc = kvn::incidence(g);
        // Gram of [pos^T; neg^T] stacked: pos pos^T + neg neg^T, order |V|.
        const Matrix gram = inc.positive_part * inc.positive_part.transposed() +
                            inc.negative_part * inc.negative_part.transposed();
        const auto ns = kvn::null_space(SymMatrix(gram));
        CHECK(ns.dimension == 0);
    }
}

TEST_CASE("discrete_laplacian closed forms", "[graph]") {
    SECTION("unit path on three vertices") {
        const WeightedOrientedGraph g({"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 1.0}});
        const SymMatrix l = kvn::discrete_laplacian(g, LaplacianMode::resistance);
        const Matrix ref{{1.0, -1.0, 0.0}, {-1.0, 2.0, -1.0}, {0.0, -1.0, 1.0}};
        CHECK((l.to_matrix() - ref).max_abs() == 0.0);
    }
    SECTION("conductance mode inverts the weights") {
        const WeightedOrientedGraph g({"a", "b"}, {{0, 1, 4.0}});
        const SymMatrix lr = kvn::discrete_laplacian(g, LaplacianMode::resistance);
        const SymMatrix lc = kvn::discrete_laplacian(g, LaplacianMode::conductance);
        CHECK(lr(0, 0) == 4.0);
        CHECK(lc(0, 0) == 0.25);
        CHECK(lc(0, 1) == -0.25);
    }
    SECTION("triangle row sums vanish") {
        const WeightedOrientedGraph g({"a", "b", "c"},
                                      {{0, 1, 2.0}, {1, 2, 0.5}, {2, 0, 1.5}});
        const SymMatrix l = kvn::discrete_laplacian(g, LaplacianMode::resistance);
        for (std::size_t i = 0; i < 3; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 3; ++j) s += l(i, j);
            CHECK(std::abs(s) < 1e-15);
        }
    }
}

TEST_CASE("laplacian equals the triple product with the incidence matrices", "[graph]") {
    for (unsigned seed : {21u, 22u, 23u, 24u}) {
        const auto g = random_graph(seed, 1 + seed % 2);
        const auto inc = kvn::incidence(g);
        for (auto mode : {LaplacianMode::resistance, LaplacianMode::conductance}) {
            Matrix weighted = inc.signed_part;  // I diag(w)
            for (std::size_t e = 0; e < g.edge_count(); ++e) {
                const double rho = g.edges()[e].weight;
                const double w = mode == LaplacianMode::resistance ? rho : 1.0 / rho;
                for (std::size_t v = 0; v < g.vertex_count(); ++v) weighted(v, e) *= w;
            }
            const Matrix triple = weighted * inc.signed_part.transposed();
            const SymMatrix l = kvn::discrete_laplacian(g, mode);
            CHECK((triple - l.to_matrix()).max_abs() < 1e-12);
        }
    }
}

TEST_CASE("quadratic form identity and positive semidefiniteness", "[graph]") {
    for (unsigned seed : {31u, 32u, 33u}) {
        const auto g = random_graph(seed, 1 + seed % 3);
        const SymMatrix l = kvn::discrete_laplacian(g, LaplacianMode::resistance);
        const Vector f = oracle::random_vector(g.vertex_count(), seed * 7u);
        const double quad = kvn::dot(f, l * f);
        double ref = 0.0;
        for (const Edge& e : g.edges()) {
            const double d = f[e.head] - f[e.tail];
            ref += e.weight * d * d;
        }
        CHECK(std::abs(quad - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
        const auto eig = kvn::sym_eig(l);
        CHECK(eig.values.front() >= -1e-10 * std::max(1.0, eig.values.back()));
    }
}

TEST_CASE("degree matches the resistance laplacian diagonal", "[graph]") {
    for (unsigned seed : {41u, 42u}) {
        const auto g = random_graph(seed);
        const SymMatrix l = kvn::discrete_laplacian(g, LaplacianMode::resistance);
        const Vector d = kvn::degree(g);
        for (std::size_t v = 0; v < g.vertex_count(); ++v)
            CHECK(std::abs(d[v] - l(v, v)) < 1e-14);
    }
}

TEST_CASE("laplacian kernel dimension equals the component count", "[graph]") {
    for (unsigned seed : {51u, 52u, 53u, 54u, 55u, 56u}) {
        const std::size_t components = 1 + seed % 3;
        const auto g = random_graph(seed, components);
        REQUIRE(g.vertex_count() <= 12);
        CHECK(kvn::connected_components(g) == components);
        CHECK(kvn::is_connected(g) == (components == 1));
        const SymMatrix l = kvn::discrete_laplacian(g, LaplacianMode::resistance);
        const auto ns = kvn::null_space(l);
        CHECK(ns.dimension == components);
    }
}

TEST_CASE("two-vertex graph laplacian is the difference form", "[graph]") {
    const WeightedOrientedGraph g({"a", "b"}, {{0, 1, 1.0}});
    const SymMatrix l = kvn::discrete_laplacian(g, LaplacianMode::resistance);
    const Matrix ref{{1.0, -1.0}, {-1.0, 1.0}};
    CHECK((l.to_matrix() - ref).max_abs() == 0.0);
    CHECK(kvn::is_connected(g));
}
