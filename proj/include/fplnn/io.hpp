#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fplnn/caselib.hpp"
#include "fplnn/certify.hpp"
#include "fplnn/errors.hpp"
#include "fplnn/iterate.hpp"
#include "fplnn/model.hpp"
#include "fplnn/oracle.hpp"
#include "fplnn/robust.hpp"

namespace fplnn {

using json = nlohmann::json;

/// 17 significant digits, '.' separator, locale independent.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class IoError : public Error {
public:
    using Error::Error;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- JSON -------------------------------------------------------------------

inline json to_json(const RegionBox& box) { return {{"lower", box.lower()}, {"upper", box.upper()}}; }

inline RegionBox region_from_json(const json& j) {
    return {j.at("lower").get<Vector>(), j.at("upper").get<Vector>()};
}

inline json to_json(const ContractionCertificate& c) {
    return {{"region", to_json(c.region)},
            {"K_hat", c.K_hat},
            {"closure_ok", c.closure_ok},
            {"grid_points_per_axis", c.grid_points_per_axis},
            {"worst_point", c.worst_point},
            {"approximate", c.approximate}};
}

inline ContractionCertificate certificate_from_json(const json& j) {
    ContractionCertificate c;
    c.region = region_from_json(j.at("region"));
    c.K_hat = j.at("K_hat").get<double>();
    c.closure_ok = j.at("closure_ok").get<bool>();
    c.grid_points_per_axis = j.at("grid_points_per_axis").get<std::size_t>();
    c.worst_point = j.at("worst_point").get<Vector>();
    c.approximate = j.value("approximate", false);
    return c;
}

inline json to_json(const IterationTrace& t) {
    json j{{"T", t.steps()}, {"converged", t.converged}, {"iterates", t.iterates}, {"residuals", t.residuals}};
    if (t.noise_applied) j["noise_applied"] = *t.noise_applied;
    return j;
}

inline json to_json(const BoundLedger& l) {
    json records = json::array();
    for (const LedgerRecord& r : l.records) {
        records.push_back({{"t", r.t},
                           {"err", r.err},
                           {"apriori", r.apriori},
                           {"aposteriori", r.aposteriori},
                           {"onestep", r.onestep},
                           {"ok", r.ok()}});
    }
    return {{"K", l.K}, {"p", l.p}, {"p_source", l.p_source}, {"violations", l.violations()}, {"records", records}};
}

inline json to_json(const RobustReport& r) {
    json violations = json::array();
    for (const RobustViolation& v : r.violations) {
        violations.push_back({{"t", v.t}, {"kind", to_string(v.kind)}, {"err", v.err}, {"bound", v.bound}});
    }
    return {{"K", r.K}, {"m", r.m}, {"p", r.p}, {"ok", r.ok()}, {"violations", violations}};
}

inline json to_json(const FixedPointRecord& r) {
    json j{{"location", r.location}, {"residual", r.residual}, {"attracting", r.attracting}};
    j["derivative_at"] = r.derivative_at ? json(*r.derivative_at) : json(nullptr);
    return j;
}

inline json to_json(const std::vector<FixedPointRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr;
}

inline json to_json(const CertifiedInterval& c) {
    return {{"region", to_json(c.region)}, {"K", c.K_claimed}, {"p", c.p_nominal}};
}

inline json to_json(const CaseStudySpec& s) {
    return {{"family", std::string(to_string(s.family))},
            {"C", s.C},
            {"d", s.d},
            {"m", s.m},
            {"per_coordinate_fixed_points", {to_json(s.per_coordinate[0]), to_json(s.per_coordinate[1])}}};
}

inline json to_json(const FixedPointCandidate& c) {
    return {{"index", c.index},
            {"choice", c.choice},
            {"location", c.location},
            {"residual", c.residual},
            {"refinement_steps", c.refinement_steps}};
}

inline json to_json(const std::vector<FixedPointCandidate>& cands) {
    json arr = json::array();
    for (const auto& c : cands) arr.push_back(to_json(c));
    return arr;
}

inline json to_json(const LoopedNetwork& net) {
    std::vector<Vector> rows;
    for (std::size_t r = 0; r < net.dim(); ++r) {
        auto row = net.weights().row(r);
        rows.emplace_back(row.begin(), row.end());
    }
    return {{"d", net.dim()}, {"W", rows}, {"b", net.bias()}, {"activation", net.activation().description}};
}

inline json to_json(const QuadraticReport& q) {
    return {{"a", q.a},           {"b", q.b},           {"c", q.c},
            {"discriminant", q.discriminant},           {"x1", q.x1},
            {"x2", q.x2},         {"slope1", q.slope1}, {"slope2", q.slope2},
            {"holds", q.holds()}, {"x2_attracting", q.x2_attracting}};
}

// ---- CSV --------------------------------------------------------------------

/// One row per step: t, x_1..x_d, residual, then ledger columns (err, apriori,
/// aposteriori, onestep) when a ledger is given, then h_1..h_d when the trace
/// carries noise. Cells undefined at t = 0 are left empty.
inline std::string trace_to_csv(const IterationTrace& trace, const BoundLedger* ledger = nullptr) {
    const std::size_t d = trace.dim();
    const bool noise = trace.noise_applied.has_value();
    std::ostringstream out;
    out << "t";
    for (std::size_t i = 1; i <= d; ++i) out << ",x" << i;
    out << ",residual";
    if (ledger) out << ",err,apriori,aposteriori,onestep";
    if (noise) for (std::size_t i = 1; i <= d; ++i) out << ",h" << i;
    out << '\n';

    for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
        out << t;
        for (double v : trace.iterates[t]) out << ',' << format_double(v);
        out << ',';
        if (t > 0) out << format_double(trace.residuals[t - 1]);
        if (ledger) {
            if (t > 0 && t - 1 < ledger->records.size()) {
                const LedgerRecord& r = ledger->records[t - 1];
                out << ',' << format_double(r.err) << ',' << format_double(r.apriori) << ','
                    << format_double(r.aposteriori) << ',' << format_double(r.onestep);
            } else {
                out << ',' << format_double(inf_distance(trace.iterates[t], ledger->p)) << ",,,";
            }
        }
        if (noise) {
            for (std::size_t i = 0; i < d; ++i) {
                out << ',';
                if (t > 0) out << format_double((*trace.noise_applied)[t - 1][i]);
            }
        }
        out << '\n';
    }
    return out.str();
}

/// Minimal CSV table builder with the same number formatting.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { row_strings(header); }

    CsvTable& row(const std::vector<double>& values) {
        require_same_size(values.size(), width_, "CsvTable::row");
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_double(v));
        row_strings(cells);
        return *this;
    }

    CsvTable& row_strings(const std::vector<std::string>& cells) {
        require_same_size(cells.size(), width_, "CsvTable::row_strings");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        return *this;
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    std::size_t width_;
    std::ostringstream out_;
};

}  // namespace fplnn
