// Command-line front end: assembles the requested operator, computes the
// requested quantities, and emits one RunReport as text, JSON, or CSV.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input or parameters,
// 3 solver failure, 4 kernel tolerance too coarse to classify.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kvn/forms.hpp"
#include "kvn/graph.hpp"
#include "kvn/graph_io.hpp"
#include "kvn/interval.hpp"
#include "kvn/linalg.hpp"
#include "kvn/metric_graph.hpp"
#include "kvn/report.hpp"
#include "kvn/semigroup.hpp"
#include "kvn/wentzell.hpp"

namespace {

struct Options {
    std::string input;
    std::string format = "text";
    std::string out;
    std::string extension = "kirchhoff";
    std::string kind = "neumann";
    std::string mode = "conductance";
    std::size_t mesh = 0;  // 0 = not given; each command fills its default
    long kcount = -1;      // -1 = not given
    double q = 0.0;
    int dirichlet_end = 0;
    double tol = -1.0;  // kernel rel_tol; -1 = resolve from env or default
    double eta1 = 1.0;
    double eta2 = 1.0;
    std::vector<double> times;
    double t_floor = 0.1;  // probe times below t_floor * h are skipped
    bool lumped = false;
};

std::string fmt_param(double x) { return kvn::detail::fmt_double(x, "%.6g"); }

/// Flag > KVN_KERNEL_TOL env > per-domain default.
double resolve_tol(double flag_value, double fallback) {
    if (flag_value > 0.0) return flag_value;
    if (const char* env = std::getenv("KVN_KERNEL_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0))
            throw kvn::ValidationError("KVN_KERNEL_TOL must be a positive number");
        return v;
    }
    return fallback;
}

std::size_t show_count(long kcount, long fallback, std::size_t available) {
    const long k = kcount < 0 ? fallback : kcount;
    if (k < 1) throw kvn::ValidationError("k must be >= 1");
    return std::min(static_cast<std::size_t>(k), available);
}

/// Equality check on integer-valued quantities.
kvn::ReportRow equal_row(std::string quantity, double value, double reference) {
    return kvn::check_row(std::move(quantity), -1, value, reference,
                          value == reference ? 0.0 : -1.0);
}

kvn::SymMatrix load_coupling(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kvn::ValidationError("cannot open coupling file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw kvn::ParseError("malformed JSON in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw kvn::ParseError("coupling document must be a JSON object");
    for (const auto& item : j.items())
        if (item.key() != "coupling")
            throw kvn::ParseError("unknown key in coupling document: " + item.key());
    if (!j.contains("coupling") || !j["coupling"].is_array())
        throw kvn::ParseError("coupling document needs a \"coupling\" matrix");
    const auto& rows = j["coupling"];
    const std::size_t n = rows.size();
    if (n == 0) throw kvn::ValidationError("coupling matrix must be nonempty");
    kvn::Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
            throw kvn::ParseError("coupling matrix must be square");
        for (std::size_t c = 0; c < n; ++c) {
            if (!rows[i][c].is_number())
                throw kvn::ParseError("coupling entries must be numbers");
            a(i, c) = rows[i][c].get<double>();
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = i + 1; c < n; ++c)
            if (std::abs(a(i, c) - a(c, i)) > 1e-12 * std::max(1.0, a.max_abs()))
                throw kvn::ValidationError("coupling matrix must be symmetric");
    return kvn::SymMatrix(a);
}

constexpr std::size_t kNoExpectation = std::numeric_limits<std::size_t>::max();

struct ExtensionChoice {
    kvn::VertexCondition condition;
    std::string name;             // canonical name for the report params
    std::size_t expected_kernel;  // kNoExpectation when unknown
    bool positive_semigroup;      // hard and kirchhoff dynamics stay positive
};

/// friedrichs = all vertex values pinned (edges decouple); kirchhoff = natural
/// coupling; krein = soft coupling; lambda:FILE = user coupling matrix.
ExtensionChoice parse_extension(const std::string& s, const kvn::WeightedOrientedGraph& g) {
    if (s == "friedrichs")
        return {kvn::VertexCondition::dirichlet(), s, 0, true};
    if (s == "kirchhoff")
        return {kvn::VertexCondition::kirchhoff(), s, kvn::connected_components(g), true};
    if (s == "krein")
        return {kvn::VertexCondition::krein(), s, g.vertex_count(), false};
    if (s.rfind("lambda:", 0) == 0) {
        const std::string path = s.substr(7);
        if (path.empty())
            throw kvn::ValidationError("lambda extension needs a file: lambda:FILE");
        return {kvn::VertexCondition::custom(load_coupling(path)), "lambda", kNoExpectation,
                false};
    }
    throw kvn::ValidationError("unknown extension: " + s +
                               " (expected friedrichs|kirchhoff|krein|lambda:FILE)");
}

kvn::RunReport run_graph(const Options& o) {
    const kvn::WeightedOrientedGraph g = kvn::load_graph(o.input);
    kvn::LaplacianMode mode;
    if (o.mode == "conductance")
        mode = kvn::LaplacianMode::conductance;
    else if (o.mode == "resistance")
        mode = kvn::LaplacianMode::resistance;
    else
        throw kvn::ValidationError("unknown mode: " + o.mode +
                                   " (expected conductance|resistance)");
    const double tol = resolve_tol(o.tol, kvn::kKernelRelTolDefault);
    const kvn::EigDecomposition eig = kvn::sym_eig(kvn::discrete_laplacian(g, mode));
    const std::size_t kernel = kvn::count_kernel(eig.values, tol);
    const std::size_t components = kvn::connected_components(g);

    kvn::RunReport rep;
    rep.tool = "graph";
    rep.input = o.input;
    rep.params = {{"mode", o.mode}, {"tol", fmt_param(tol)}};
    const std::size_t show = show_count(o.kcount, 6, eig.values.size());
    for (std::size_t j = 0; j < show; ++j)
        rep.rows.push_back(kvn::data_row("lambda", static_cast<long>(j), eig.values[j]));
    rep.rows.push_back(kvn::data_row("components", -1, static_cast<double>(components)));
    rep.rows.push_back(equal_row("kernel_dim", static_cast<double>(kernel),
                                 static_cast<double>(components)));
    return rep;
}

kvn::RunReport run_qg_spectrum(const Options& o) {
    const kvn::WeightedOrientedGraph g = kvn::load_graph(o.input);
    const ExtensionChoice ext = parse_extension(o.extension, g);
    const std::size_t mesh = o.mesh == 0 ? 16 : o.mesh;
    const kvn::MetricGraph mg(g, mesh);
    const kvn::DiscretizedForm form = kvn::assemble(mg, ext.condition, o.lumped);
    const double tol = resolve_tol(o.tol, kvn::kKernelRelTolFem);
    const kvn::Spectrum spec = kvn::pencil_spectrum(form.stiffness, form.mass, tol);

    kvn::RunReport rep;
    rep.tool = "qg spectrum";
    rep.input = o.input;
    rep.params = {{"extension", ext.name},
                  {"mesh", std::to_string(mesh)},
                  {"lumped", o.lumped ? "true" : "false"},
                  {"tol", fmt_param(tol)}};
    const std::size_t show = show_count(o.kcount, 6, spec.values.size());
    for (std::size_t j = 0; j < show; ++j)
        rep.rows.push_back(kvn::data_row("lambda", static_cast<long>(j), spec.values[j]));
    if (ext.expected_kernel == kNoExpectation)
        rep.rows.push_back(kvn::data_row("kernel_dim", -1, static_cast<double>(spec.kernel_dim)));
    else
        rep.rows.push_back(equal_row("kernel_dim", static_cast<double>(spec.kernel_dim),
                                     static_cast<double>(ext.expected_kernel)));
    return rep;
}

kvn::RunReport run_qg_kernel(const Options& o) {
    const kvn::WeightedOrientedGraph g = kvn::load_graph(o.input);
    const ExtensionChoice ext = parse_extension(o.extension, g);
    const std::size_t mesh = o.mesh == 0 ? 16 : o.mesh;
    const kvn::MetricGraph mg(g, mesh);
    const kvn::DiscretizedForm form = kvn::assemble(mg, ext.condition);
    const double tol = resolve_tol(o.tol, kvn::kKernelRelTolFem);
    const kvn::Spectrum spec = kvn::pencil_spectrum(form.stiffness, form.mass, tol);

    kvn::RunReport rep;
    rep.tool = "qg kernel";
    rep.input = o.input;
    rep.params = {{"extension", ext.name},
                  {"mesh", std::to_string(mesh)},
                  {"tol", fmt_param(tol)}};
    if (ext.expected_kernel == kNoExpectation)
        rep.rows.push_back(kvn::data_row("kernel_dim", -1, static_cast<double>(spec.kernel_dim)));
    else
        rep.rows.push_back(equal_row("kernel_dim", static_cast<double>(spec.kernel_dim),
                                     static_cast<double>(ext.expected_kernel)));
    if (spec.kernel_dim < spec.values.size())
        rep.rows.push_back(kvn::data_row("first_nonzero", -1, spec.values[spec.kernel_dim]));
    return rep;
}

kvn::RunReport run_qg_semigroup(const Options& o) {
    const kvn::WeightedOrientedGraph g = kvn::load_graph(o.input);
    const ExtensionChoice ext = parse_extension(o.extension, g);
    const std::size_t mesh = o.mesh == 0 ? 16 : o.mesh;
    const kvn::MetricGraph mg(g, mesh);
    const kvn::DiscretizedForm form = kvn::assemble(mg, ext.condition, /*lumped=*/true);
    const kvn::Vector diag = form.mass.diagonal_values();

    std::vector<double> times = o.times.empty()
                                    ? std::vector<double>{1e-3, 1e-2, 0.1, 1.0}
                                    : o.times;
    std::sort(times.begin(), times.end());
    for (double t : times)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw kvn::ValidationError("probe times must be finite and nonnegative");
    if (!(o.t_floor >= 0.0) || !std::isfinite(o.t_floor))
        throw kvn::ValidationError("--t-floor must be finite and nonnegative");

    double h_min = std::numeric_limits<double>::infinity();
    for (const kvn::Edge& e : g.edges())
        h_min = std::min(h_min, e.weight / static_cast<double>(mesh));
    // Below ~h the discrete flow only resolves the mesh, not the operator;
    // verdicts there would be about rounding, so those times are skipped.
    const double floor_t = o.t_floor * h_min;

    kvn::RunReport rep;
    rep.tool = "qg semigroup";
    rep.input = o.input;
    rep.params = {{"extension", ext.name},
                  {"mesh", std::to_string(mesh)},
                  {"t_floor", fmt_param(o.t_floor)},
                  {"entry_tol", fmt_param(kvn::kSemigroupTolDefault)}};

    bool any_evaluated = false;
    bool all_positive = true;
    bool violation_found = false;
    double violation_t = 0.0, violation_entry = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        rep.rows.push_back(kvn::data_row("t", static_cast<long>(i), times[i]));
        if (times[i] < floor_t) {
            kvn::ReportRow skip;
            skip.quantity = "min_entry";
            skip.k = static_cast<long>(i);
            skip.value = std::numeric_limits<double>::quiet_NaN();
            skip.verdict = "SKIPPED";
            rep.rows.push_back(skip);
            continue;
        }
        any_evaluated = true;
        const kvn::SemigroupSample s = kvn::evolve(form.stiffness, diag, times[i]);
        const kvn::PositivityReport pos = kvn::check_positivity(s);
        if (!pos.positive) {
            all_positive = false;
            if (!violation_found) {
                violation_found = true;
                violation_t = times[i];
                violation_entry = pos.min_entry;
            }
        }
        if (ext.positive_semigroup)
            rep.rows.push_back(kvn::check_row("min_entry", static_cast<long>(i), pos.min_entry,
                                              0.0, pos.min_entry + kvn::kSemigroupTolDefault));
        else
            rep.rows.push_back(
                kvn::data_row("min_entry", static_cast<long>(i), pos.min_entry));
    }

    if (!any_evaluated) {
        kvn::ReportRow skip;
        skip.quantity = ext.positive_semigroup ? "positive" : "violation_found";
        skip.value = std::numeric_limits<double>::quiet_NaN();
        skip.verdict = "SKIPPED";
        rep.rows.push_back(skip);
    } else if (ext.positive_semigroup) {
        rep.rows.push_back(equal_row("positive", all_positive ? 1.0 : 0.0, 1.0));
    } else if (ext.name == "krein") {
        // The soft flow is expected to leave the positive cone at the probed
        // times; not finding a violation fails the probe.
        rep.rows.push_back(equal_row("violation_found", violation_found ? 1.0 : 0.0, 1.0));
    } else {
        rep.rows.push_back(
            kvn::data_row("violation_found", -1, violation_found ? 1.0 : 0.0));
    }
    if (violation_found) {
        rep.rows.push_back(kvn::data_row("violation_t", -1, violation_t));
        rep.rows.push_back(kvn::data_row("violation_entry", -1, violation_entry));
    }
    return rep;
}

kvn::RunReport run_qg_probe(const Options& o) {
    const kvn::WeightedOrientedGraph g = kvn::load_graph(o.input);
    const ExtensionChoice ext = parse_extension(o.extension, g);
    const std::size_t mesh = o.mesh == 0 ? 8 : o.mesh;
    const kvn::MetricGraph mg(g, mesh);
    const double tol = resolve_tol(o.tol, kvn::kKernelRelTolFem);
    const long k = o.kcount < 0 ? 3 : o.kcount;
    if (k < 1) throw kvn::ValidationError("k must be >= 1");
    const kvn::RefinementReport ref = kvn::refine_and_estimate_order(
        mg, ext.condition, static_cast<std::size_t>(k), tol);

    kvn::RunReport rep;
    rep.tool = "qg probe";
    rep.input = o.input;
    rep.params = {{"extension", ext.name},
                  {"mesh", std::to_string(mesh)},
                  {"k", std::to_string(k)},
                  {"tol", fmt_param(tol)}};
    for (std::size_t j = 0; j < ref.fine.size(); ++j)
        rep.rows.push_back(kvn::data_row("lambda_fine", static_cast<long>(j), ref.fine[j]));
    // P1 eigenvalues converge at order 2; an estimate far from that means the
    // tracked mode was misidentified across meshes.
    for (std::size_t j = 0; j < ref.orders.size(); ++j)
        rep.rows.push_back(kvn::check_row("order", static_cast<long>(j), ref.orders[j], 2.0,
                                          0.7 - std::abs(ref.orders[j] - 2.0)));
    return rep;
}

kvn::IntervalOperatorSpec interval_spec(const Options& o) {
    kvn::IntervalOperatorSpec spec;
    if (o.kind == "neumann")
        spec.kind = kvn::IntervalKind::neumann;
    else if (o.kind == "dirichlet")
        spec.kind = kvn::IntervalKind::dirichlet;
    else if (o.kind == "mixed")
        spec.kind = kvn::IntervalKind::mixed;
    else if (o.kind == "robin")
        spec.kind = kvn::IntervalKind::robin;
    else if (o.kind == "krein")
        spec.kind = kvn::IntervalKind::krein;
    else
        throw kvn::ValidationError("unknown kind: " + o.kind +
                                   " (expected neumann|dirichlet|mixed|robin|krein)");
    spec.q = o.q;
    spec.dirichlet_end = o.dirichlet_end;
    return spec;
}

std::size_t interval_kernel_dim(const kvn::IntervalOperatorSpec& spec) {
    switch (spec.kind) {
        case kvn::IntervalKind::neumann: return 1;
        case kvn::IntervalKind::krein: return 2;
        case kvn::IntervalKind::robin: return spec.q == 0.0 || spec.q == -2.0 ? 1 : 0;
        default: return 0;
    }
}

/// Consistent and lumped P1 eigenvalue errors are both ~ lambda^2 h^2 / 12
/// (opposite signs); twice that plus an absolute floor is the check budget.
double fem_error_budget(double lambda_exact, std::size_t mesh) {
    const double h = 1.0 / static_cast<double>(mesh);
    return 2.0 * (lambda_exact * lambda_exact * h * h / 12.0 + 1e-9);
}

void append_interval_fem_rows(kvn::RunReport& rep, const std::string& prefix,
                              const kvn::IntervalOperatorSpec& spec, std::size_t mesh,
                              bool lumped, std::size_t k, const kvn::Vector& exact,
                              double tol) {
    const kvn::DiscretizedForm form = kvn::assemble_interval(spec, mesh, lumped);
    const kvn::Spectrum fem = kvn::pencil_spectrum(form.stiffness, form.mass, tol);
    rep.rows.push_back(equal_row(prefix + "kernel_dim", static_cast<double>(fem.kernel_dim),
                                 static_cast<double>(interval_kernel_dim(spec))));
    const std::size_t n = std::min(k, fem.values.size());
    for (std::size_t j = 0; j < n; ++j) {
        const double budget = fem_error_budget(exact[j], mesh);
        rep.rows.push_back(kvn::check_row(prefix + "lambda_fem", static_cast<long>(j),
                                          fem.values[j], exact[j],
                                          budget - std::abs(fem.values[j] - exact[j])));
    }
}

kvn::RunReport run_interval(const Options& o) {
    const kvn::IntervalOperatorSpec spec = interval_spec(o);
    const long k = o.kcount < 0 ? 6 : o.kcount;
    if (k < 1) throw kvn::ValidationError("k must be >= 1");
    const std::vector<kvn::SecularRoot> roots =
        kvn::exact_spectrum(spec, static_cast<std::size_t>(k));
    const kvn::Vector exact = kvn::eigenvalues(roots);

    kvn::RunReport rep;
    rep.tool = "interval";
    rep.input = "unit interval";
    rep.params = {{"kind", o.kind}};
    if (spec.kind == kvn::IntervalKind::robin) rep.params.push_back({"q", fmt_param(spec.q)});
    if (spec.kind == kvn::IntervalKind::mixed)
        rep.params.push_back({"dirichlet_end", std::to_string(spec.dirichlet_end)});
    rep.params.push_back({"k", std::to_string(k)});
    for (std::size_t j = 0; j < exact.size(); ++j)
        rep.rows.push_back(kvn::data_row("lambda_exact", static_cast<long>(j), exact[j]));
    for (std::size_t r = 0; r < roots.size(); ++r)
        rep.rows.push_back(kvn::check_row("secular_residual", static_cast<long>(r),
                                          roots[r].residual, 0.0,
                                          1e-9 - std::abs(roots[r].residual)));
    if (o.mesh != 0) {
        rep.params.push_back({"mesh", std::to_string(o.mesh)});
        rep.params.push_back({"lumped", o.lumped ? "true" : "false"});
        const double tol = resolve_tol(o.tol, kvn::kKernelRelTolFem);
        rep.params.push_back({"tol", fmt_param(tol)});
        append_interval_fem_rows(rep, "", spec, o.mesh, o.lumped,
                                 static_cast<std::size_t>(k), exact, tol);
    }
    return rep;
}

kvn::RunReport run_wentzell(const Options& o) {
    const kvn::WentzellParams p{o.eta1, o.eta2};
    const std::size_t mesh = o.mesh == 0 ? 32 : o.mesh;
    const long k = o.kcount < 0 ? 6 : o.kcount;
    if (k < 1) throw kvn::ValidationError("k must be >= 1");
    const double tol = resolve_tol(o.tol, kvn::kKernelRelTolFem);
    const kvn::WentzellComparison cmp =
        kvn::wentzell_compare(p, mesh, static_cast<std::size_t>(k), tol);

    kvn::RunReport rep;
    rep.tool = "wentzell";
    rep.input = "unit interval with boundary coupling";
    rep.params = {{"eta1", fmt_param(p.eta1)},
                  {"eta2", fmt_param(p.eta2)},
                  {"mesh", std::to_string(mesh)},
                  {"k", std::to_string(k)},
                  {"tol", fmt_param(tol)}};
    rep.rows.push_back(equal_row("kernel_dim", static_cast<double>(cmp.kernel_dim), 2.0));
    for (std::size_t j = 0; j < cmp.hard.size(); ++j) {
        const double floor = 1e-10 * (1.0 + std::abs(cmp.hard[j]));
        rep.rows.push_back(kvn::data_row("hard", static_cast<long>(j), cmp.hard[j]));
        rep.rows.push_back(kvn::data_row("soft", static_cast<long>(j), cmp.soft[j]));
        rep.rows.push_back(kvn::check_row("soft_below_hard", static_cast<long>(j),
                                          cmp.soft_margins[j], 0.0,
                                          cmp.soft_margins[j] + floor));
        rep.rows.push_back(kvn::check_row("reduced_dominates", static_cast<long>(j),
                                          cmp.dominance_margins[j], 0.0,
                                          cmp.dominance_margins[j] + floor));
    }
    return rep;
}

kvn::RunReport run_compare(const Options& o) {
    const std::size_t mesh = o.mesh == 0 ? 64 : o.mesh;
    const long k = o.kcount < 0 ? 4 : o.kcount;
    if (k < 1) throw kvn::ValidationError("k must be >= 1");
    const double tol = resolve_tol(o.tol, kvn::kKernelRelTolFem);

    kvn::RunReport rep;
    rep.tool = "compare";
    rep.input = "closed-form interval spectra vs P1 discretization";
    rep.params = {{"mesh", std::to_string(mesh)},
                  {"k", std::to_string(k)},
                  {"tol", fmt_param(tol)}};

    const struct {
        kvn::IntervalOperatorSpec spec;
        const char* name;
    } cases[] = {
        {{kvn::IntervalKind::neumann, 0.0, 0}, "neumann"},
        {{kvn::IntervalKind::dirichlet, 0.0, 0}, "dirichlet"},
        {{kvn::IntervalKind::mixed, 0.0, 0}, "mixed"},
        {{kvn::IntervalKind::robin, 3.0, 0}, "robin_q3"},
        {{kvn::IntervalKind::krein, 0.0, 0}, "krein"},
    };
    for (const auto& c : cases) {
        const kvn::Vector exact =
            kvn::eigenvalues(kvn::exact_spectrum(c.spec, static_cast<std::size_t>(k)));
        append_interval_fem_rows(rep, std::string(c.name) + ".", c.spec, mesh,
                                 /*lumped=*/false, static_cast<std::size_t>(k), exact, tol);
    }

    // The half-cell Dirichlet-to-Neumann matrix has the exact integer stencil.
    const kvn::SymMatrix dtn = kvn::dtn_interval();
    const kvn::SymMatrix ref{{1.0, -1.0}, {-1.0, 1.0}};
    const double diff = (dtn.to_matrix() - ref.to_matrix()).max_abs();
    rep.rows.push_back(kvn::check_row("dtn_entry_error", -1, diff, 0.0, 1e-12 - diff));
    return rep;
}

void emit(const kvn::RunReport& rep, const std::string& format, const std::string& out_path) {
    std::string text;
    if (format == "json")
        text = kvn::to_json(rep);
    else if (format == "csv")
        text = kvn::to_csv(rep);
    else
        text = kvn::to_text(rep);
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw kvn::ValidationError("cannot open output file: " + out_path);
    f << text;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--format", o.format, "output format: text|json|csv");
    cmd->add_option("--out", o.out, "write the report to this file instead of stdout");
    cmd->add_option("--tol", o.tol, "kernel classification rel_tol (overrides KVN_KERNEL_TOL)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-adjoint extensions of graph and interval Laplacians"};
    app.set_version_flag("--version", kvn::kToolVersion);
    app.require_subcommand(1);

    Options o;
    kvn::RunReport rep;

    CLI::App* graph = app.add_subcommand("graph", "discrete weighted graph Laplacian");
    graph->add_option("--input", o.input, "graph JSON file")->required();
    graph->add_option("--mode", o.mode, "edge weight role: conductance|resistance");
    graph->add_option("-k,--k", o.kcount, "eigenvalues to list (default 6)");
    add_common(graph, o);
    graph->callback([&] { rep = run_graph(o); });

    CLI::App* qg = app.add_subcommand("qg", "metric (quantum) graph Laplacian");
    qg->require_subcommand(1);
    const auto add_qg_common = [&](CLI::App* cmd) {
        cmd->add_option("--input", o.input, "graph JSON file (edge weights = lengths)")
            ->required();
        cmd->add_option("--extension", o.extension,
                        "friedrichs|kirchhoff|krein|lambda:FILE (default kirchhoff)");
        cmd->add_option("--mesh", o.mesh, "cells per edge");
        add_common(cmd, o);
    };
    CLI::App* qg_spectrum = qg->add_subcommand("spectrum", "pencil eigenvalues");
    add_qg_common(qg_spectrum);
    qg_spectrum->add_option("-k,--k", o.kcount, "eigenvalues to list (default 6)");
    qg_spectrum->add_flag("--lumped", o.lumped, "use the lumped mass matrix");
    qg_spectrum->callback([&] { rep = run_qg_spectrum(o); });

    CLI::App* qg_kernel = qg->add_subcommand("kernel", "kernel dimension vs expectation");
    add_qg_common(qg_kernel);
    qg_kernel->callback([&] { rep = run_qg_kernel(o); });

    CLI::App* qg_semigroup =
        qg->add_subcommand("semigroup", "entrywise positivity of the heat flow");
    add_qg_common(qg_semigroup);
    qg_semigroup->add_option("--t", o.times, "sample times (default 1e-3 1e-2 0.1 1)");
    qg_semigroup->add_option("--t-floor", o.t_floor,
                             "skip times below this multiple of the mesh width (0 disables)");
    qg_semigroup->callback([&] { rep = run_qg_semigroup(o); });

    CLI::App* qg_probe = qg->add_subcommand("probe", "refinement convergence order");
    add_qg_common(qg_probe);
    qg_probe->add_option("-k,--k", o.kcount, "nonzero eigenvalues to track (default 3)");
    qg_probe->callback([&] { rep = run_qg_probe(o); });

    CLI::App* interval = app.add_subcommand("interval", "unit-interval Laplacian");
    interval->add_option("--kind", o.kind, "neumann|dirichlet|mixed|robin|krein");
    interval->add_option("--q", o.q, "robin boundary coefficient");
    interval->add_option("--dirichlet-end", o.dirichlet_end, "mixed: pinned end, 0 or 1");
    interval->add_option("-k,--k", o.kcount, "eigenvalues to list (default 6)");
    interval->add_option("--mesh", o.mesh, "also check a P1 discretization at this mesh");
    interval->add_flag("--lumped", o.lumped, "use the lumped mass matrix");
    add_common(interval, o);
    interval->callback([&] { rep = run_interval(o); });

    CLI::App* wentzell = app.add_subcommand("wentzell", "interval with boundary coupling");
    wentzell->add_option("--eta1", o.eta1, "inert boundary weight (>= 0)");
    wentzell->add_option("--eta2", o.eta2, "boundary coupling strength (> 0)");
    wentzell->add_option("--mesh", o.mesh, "cells (default 32)");
    wentzell->add_option("-k,--k", o.kcount, "eigenvalue pairs to compare (default 6)");
    add_common(wentzell, o);
    wentzell->callback([&] { rep = run_wentzell(o); });

    CLI::App* compare = app.add_subcommand("compare", "cross-validate solvers");
    compare->add_option("--mesh", o.mesh, "cells (default 64)");
    compare->add_option("-k,--k", o.kcount, "eigenvalues per kind (default 4)");
    add_common(compare, o);
    compare->callback([&] { rep = run_compare(o); });

    try {
        app.parse(argc, argv);
        if (o.format != "text" && o.format != "json" && o.format != "csv")
            throw kvn::ValidationError("unknown format: " + o.format +
                                       " (expected text|json|csv)");
        emit(rep, o.format, o.out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const kvn::TolTooCoarse& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const kvn::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const kvn::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const kvn::InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
    return rep.all_pass() ? 0 : 1;
}
