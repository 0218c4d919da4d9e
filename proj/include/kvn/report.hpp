#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace kvn {

inline constexpr const char* kToolVersion = "0.1.0";

/// One reported quantity. `reference` and `margin` are NaN when the row is
/// plain data rather than a check; serializers drop the empty fields. For a
/// check, `margin` is the signed slack: >= 0 passes.
struct ReportRow {
    std::string quantity;
    long k = -1;  // sequence index, or -1 for scalar quantities
    double value = 0.0;
    double reference = std::numeric_limits<double>::quiet_NaN();
    double margin = std::numeric_limits<double>::quiet_NaN();
    std::string verdict;  // "PASS", "FAIL", "SKIPPED", or "" for plain data
};

inline ReportRow data_row(std::string quantity, long k, double value) {
    ReportRow r;
    r.quantity = std::move(quantity);
    r.k = k;
    r.value = value;
    return r;
}

/// Check row: verdict derives from the sign of the margin.
inline ReportRow check_row(std::string quantity, long k, double value, double reference,
                           double margin) {
    ReportRow r;
    r.quantity = std::move(quantity);
    r.k = k;
    r.value = value;
    r.reference = reference;
    r.margin = margin;
    r.verdict = margin >= 0.0 ? "PASS" : "FAIL";
    return r;
}

struct RunReport {
    std::string tool;   // subcommand path, e.g. "qg spectrum"
    std::string input;  // input file or builtin model description
    std::vector<std::pair<std::string, std::string>> params;  // ordered, stringified
    std::vector<ReportRow> rows;

    bool all_pass() const {
        for (const ReportRow& r : rows)
            if (r.verdict == "FAIL") return false;
        return true;
    }
};

namespace detail {

inline std::string fmt_double(double x, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

/// Round-trip exact; non-finite values become JSON null.
inline std::string json_number(double x) {
    if (!std::isfinite(x)) return "null";
    return fmt_double(x, "%.17g");
}

}  // namespace detail

/// UTC timestamp for report headers. Honors SOURCE_DATE_EPOCH so regenerated
/// reports are byte-identical under a pinned clock.
inline std::string report_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long pinned = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') t = static_cast<std::time_t>(pinned);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string to_json(const RunReport& rep) {
    using detail::json_escape;
    using detail::json_number;
    std::string out = "{\n";
    out += "  \"version\": \"" + std::string(kToolVersion) + "\",\n";
    out += "  \"generated_utc\": \"" + report_timestamp() + "\",\n";
    out += "  \"tool\": \"" + json_escape(rep.tool) + "\",\n";
    out += "  \"input\": \"" + json_escape(rep.input) + "\",\n";
    out += "  \"params\": {";
    for (std::size_t i = 0; i < rep.params.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + json_escape(rep.params[i].first) + "\": \"" +
               json_escape(rep.params[i].second) + "\"";
    }
    out += "},\n  \"rows\": [\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const ReportRow& r = rep.rows[i];
        out += "    {\"quantity\": \"" + json_escape(r.quantity) + "\"";
        if (r.k >= 0) out += ", \"k\": " + std::to_string(r.k);
        out += ", \"value\": " + json_number(r.value);
        if (std::isfinite(r.reference)) out += ", \"reference\": " + json_number(r.reference);
        if (std::isfinite(r.margin)) out += ", \"margin\": " + json_number(r.margin);
        if (!r.verdict.empty()) out += ", \"verdict\": \"" + r.verdict + "\"";
        out += i + 1 < rep.rows.size() ? "},\n" : "}\n";
    }
    out += "  ],\n";
    out += std::string("  \"all_pass\": ") + (rep.all_pass() ? "true" : "false") + "\n";
    out += "}\n";
    return out;
}

inline std::string to_csv(const RunReport& rep) {
    using detail::fmt_double;
    std::string out = "quantity,k,value,reference,margin,verdict\n";
    for (const ReportRow& r : rep.rows) {
        out += r.quantity + ",";
        if (r.k >= 0) out += std::to_string(r.k);
        out += ",";
        if (std::isfinite(r.value)) out += fmt_double(r.value, "%.12g");
        out += ",";
        if (std::isfinite(r.reference)) out += fmt_double(r.reference, "%.12g");
        out += ",";
        if (std::isfinite(r.margin)) out += fmt_double(r.margin, "%.12g");
        out += "," + r.verdict + "\n";
    }
    return out;
}

inline std::string to_text(const RunReport& rep) {
    using detail::fmt_double;
    std::string out = "kvn " + std::string(kToolVersion) + " — " + rep.tool + "\n";
    out += "input: " + rep.input + "\n";
    for (const auto& p : rep.params) out += "  " + p.first + " = " + p.second + "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %5s %24s %24s %14s  %s\n", "quantity", "k", "value",
                  "reference", "margin", "verdict");
    out += buf;
    for (const ReportRow& r : rep.rows) {
        const std::string k = r.k >= 0 ? std::to_string(r.k) : "";
        const std::string ref =
            std::isfinite(r.reference) ? fmt_double(r.reference, "%.12g") : "";
        const std::string mar = std::isfinite(r.margin) ? fmt_double(r.margin, "%.6g") : "";
        std::snprintf(buf, sizeof buf, "%-22s %5s %24s %24s %14s  %s\n", r.quantity.c_str(),
                      k.c_str(), fmt_double(r.value, "%.12g").c_str(), ref.c_str(), mar.c_str(),
                      r.verdict.c_str());
        out += buf;
    }
    std::size_t fails = 0, checks = 0;
    for (const ReportRow& r : rep.rows) {
        if (r.verdict == "FAIL") ++fails;
        if (!r.verdict.empty() && r.verdict != "SKIPPED") ++checks;
    }
    if (checks == 0)
        out += "no checks\n";
    else if (fails == 0)
        out += "all checks passed (" + std::to_string(checks) + ")\n";
    else
        out += std::to_string(fails) + " of " + std::to_string(checks) + " checks FAILED\n";
    return out;
}

}  // namespace kvn
