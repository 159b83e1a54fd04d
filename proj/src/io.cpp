#include "multigof/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "multigof/numeric.hpp"

namespace mgof {

namespace {

using nlohmann::json;

struct CsvRow {
    long line = 0;  // 1-based file line
    std::string first;
    std::string second;
};

[[noreturn]] void parse_fail(const std::string& path, long line, const std::string& message) {
    fail("parse", path + ":" + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<CsvRow> read_two_column_csv(const std::string& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open '" + path + "'", ErrorCategory::runtime);
    std::vector<CsvRow> rows;
    std::string line;
    long lineno = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        std::size_t comma = t.find(',');
        if (comma == std::string::npos) {
            parse_fail(path, lineno, "expected two comma-separated fields");
        }
        std::string first = trim(t.substr(0, comma));
        std::string second = trim(t.substr(comma + 1));
        if (second.find(',') != std::string::npos) {
            parse_fail(path, lineno, "expected exactly two fields");
        }
        if (!seen_header) {
            if (first + "," + second != header) {
                parse_fail(path, lineno, "expected header '" + header + "'");
            }
            seen_header = true;
            continue;
        }
        rows.push_back({lineno, first, second});
    }
    if (!seen_header) {
        throw Error("parse", path + ": empty file (expected header '" + header + "')",
                    ErrorCategory::validation);
    }
    if (rows.empty()) throw Error("parse", path + ": no data rows", ErrorCategory::validation);
    return rows;
}

long parse_long(const std::string& path, long line, const std::string& text,
                const char* what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0') {
        parse_fail(path, line, std::string("bad ") + what + " '" + text + "'");
    }
    return v;
}

double parse_double(const std::string& path, long line, const std::string& text,
                    const char* what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
        parse_fail(path, line, std::string("bad ") + what + " '" + text + "'");
    }
    return v;
}

// Places per-bin values into a dense 1..d vector with d = row count. Bins
// must be 1..d contiguous; a bin beyond d means some smaller bin is missing,
// which is the error actually reported.
template <typename T>
std::vector<T> collect_bins(const std::string& path,
                            const std::vector<std::pair<long, std::pair<long, T>>>& parsed) {
    long d = static_cast<long>(parsed.size());
    std::map<long, T> by_bin;
    for (const auto& [line, bin_value] : parsed) {
        long bin = bin_value.first;
        if (bin < 1) parse_fail(path, line, "bin indices are 1-based");
        if (!by_bin.emplace(bin, bin_value.second).second) {
            parse_fail(path, line, "duplicate bin " + std::to_string(bin));
        }
    }
    for (long b = 1; b <= d; ++b) {
        if (by_bin.find(b) == by_bin.end()) {
            throw Error("parse", path + ": missing bin " + std::to_string(b),
                        ErrorCategory::validation);
        }
    }
    std::vector<T> values(static_cast<std::size_t>(d));
    for (long b = 1; b <= d; ++b) values[static_cast<std::size_t>(b - 1)] = by_bin[b];
    return values;
}

void dump_value_17(const json& j, std::string& out, int indent, int depth);

void dump_indent(std::string& out, int indent, int depth) {
    if (indent > 0) {
        out.push_back('\n');
        out.append(static_cast<std::size_t>(indent * depth), ' ');
    }
}

void dump_value_17(const json& j, std::string& out, int indent, int depth) {
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                dump_indent(out, indent, depth + 1);
                out += json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                dump_value_17(it.value(), out, indent, depth + 1);
            }
            dump_indent(out, indent, depth);
            out.push_back('}');
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out.push_back('[');
            bool first = true;
            for (const auto& item : j) {
                if (!first) out.push_back(',');
                first = false;
                dump_indent(out, indent, depth + 1);
                dump_value_17(item, out, indent, depth + 1);
            }
            dump_indent(out, indent, depth);
            out.push_back(']');
            return;
        }
        case json::value_t::number_float:
            out += format_g17(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string format_g17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string dump_json_17(const nlohmann::json& j, int indent) {
    std::string out;
    dump_value_17(j, out, indent, 0);
    return out;
}

ProbVector load_dist_csv(const std::string& path) {
    auto rows = read_two_column_csv(path, "bin,value");
    std::vector<std::pair<long, std::pair<long, double>>> parsed;
    parsed.reserve(rows.size());
    for (const auto& row : rows) {
        long bin = parse_long(path, row.line, row.first, "bin index");
        double value = parse_double(path, row.line, row.second, "value");
        if (value < 0.0) parse_fail(path, row.line, "negative probability");
        parsed.push_back({row.line, {bin, value}});
    }
    std::vector<double> values = collect_bins<double>(path, parsed);
    KahanSum sum;
    for (double v : values) sum.add(v);
    if (std::fabs(sum.value() - 1.0) > 1e-6) {
        throw Error("parse",
                    path + ": probabilities sum to " + format_g17(sum.value()) +
                        ", outside the 1e-6 tolerance",
                    ErrorCategory::validation);
    }
    return ProbVector(std::move(values));
}

CountVector load_counts_csv(const std::string& path) {
    auto rows = read_two_column_csv(path, "bin,count");
    std::vector<std::pair<long, std::pair<long, std::int64_t>>> parsed;
    parsed.reserve(rows.size());
    for (const auto& row : rows) {
        long bin = parse_long(path, row.line, row.first, "bin index");
        long count = parse_long(path, row.line, row.second, "count");
        if (count < 0) parse_fail(path, row.line, "negative count");
        parsed.push_back({row.line, {bin, static_cast<std::int64_t>(count)}});
    }
    return CountVector(collect_bins<std::int64_t>(path, parsed));
}

SampleList load_samples_csv(const std::string& path, int d) {
    auto rows = read_two_column_csv(path, "obs,bin");
    std::vector<std::pair<long, std::pair<long, std::int32_t>>> parsed;
    parsed.reserve(rows.size());
    long max_bin = 0;
    for (const auto& row : rows) {
        long obs = parse_long(path, row.line, row.first, "observation index");
        long bin = parse_long(path, row.line, row.second, "bin index");
        if (bin < 1) parse_fail(path, row.line, "bin indices are 1-based");
        max_bin = std::max(max_bin, bin);
        parsed.push_back({row.line, {obs, static_cast<std::int32_t>(bin - 1)}});
    }
    if (d == 0) d = static_cast<int>(max_bin);
    long n = static_cast<long>(parsed.size());
    std::vector<std::int32_t> bins(static_cast<std::size_t>(n));
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (const auto& [line, obs_bin] : parsed) {
        long obs = obs_bin.first;
        if (obs < 1 || obs > n) {
            parse_fail(path, line,
                       "observation " + std::to_string(obs) + " out of range 1.." +
                           std::to_string(n));
        }
        if (seen[static_cast<std::size_t>(obs - 1)]) {
            parse_fail(path, line, "duplicate observation " + std::to_string(obs));
        }
        if (obs_bin.second >= d) {
            parse_fail(path, line, "bin exceeds dimension " + std::to_string(d));
        }
        seen[static_cast<std::size_t>(obs - 1)] = true;
        bins[static_cast<std::size_t>(obs - 1)] = obs_bin.second;
    }
    return SampleList(d, std::move(bins));
}

WeightVector load_weight_csv(const std::string& path) {
    auto rows = read_two_column_csv(path, "bin,value");
    std::vector<std::pair<long, std::pair<long, double>>> parsed;
    parsed.reserve(rows.size());
    for (const auto& row : rows) {
        long bin = parse_long(path, row.line, row.first, "bin index");
        double value = parse_double(path, row.line, row.second, "value");
        if (value <= 0.0) parse_fail(path, row.line, "weights must be strictly positive");
        parsed.push_back({row.line, {bin, value}});
    }
    return WeightVector(collect_bins<double>(path, parsed),
                        {WeightKind::custom, 0.0});
}

void write_dist_csv(std::ostream& out, const ProbVector& pi) {
    out << "bin,value\n";
    for (int j = 0; j < pi.dim(); ++j) {
        out << (j + 1) << ',' << format_g17(pi[j]) << '\n';
    }
}

void write_counts_csv(std::ostream& out, const CountVector& counts) {
    out << "bin,count\n";
    for (int j = 0; j < counts.dim(); ++j) {
        out << (j + 1) << ',' << counts[j] << '\n';
    }
}

void write_weight_csv(std::ostream& out, const WeightVector& w) {
    out << "bin,value\n";
    for (int j = 0; j < w.dim(); ++j) {
        out << (j + 1) << ',' << format_g17(w[j]) << '\n';
    }
}

json test_result_json(const TestResult& result) {
    json j;
    j["statistic"] = result.statistic;
    j["calibration"] = to_string(result.calibration);
    j["critical_value"] = result.critical_value;
    if (result.p_value.has_value()) j["p_value"] = *result.p_value;
    j["reject"] = result.reject;
    j["alpha"] = result.alpha;
    j["n"] = result.n;
    j["d"] = result.d;
    j["weight_provenance"] = result.weight_provenance;
    return j;
}

json power_report_json(const PowerStudyReport& report, const std::string& scenario) {
    json config;
    config["n"] = report.n;
    config["d"] = report.d;
    config["reps"] = report.reps;
    config["alpha"] = report.alpha;
    config["seed"] = report.seed;
    config["calibration"] = to_string(report.calibration);
    config["null"] = report.null_label;
    json cells = json::array();
    for (const auto& cell : report.cells) {
        json c;
        c["statistic"] = cell.statistic;
        c["alternative"] = cell.alternative;
        if (std::isnan(cell.r)) {
            c["r"] = nullptr;
        } else {
            c["r"] = cell.r;
        }
        c["null_quantile"] = cell.null_quantile;
        c["power"] = cell.empirical_power;
        c["se"] = cell.standard_error;
        c["reps"] = cell.reps;
        cells.push_back(std::move(c));
    }
    json j;
    j["scenario"] = scenario;
    j["config"] = std::move(config);
    j["cells"] = std::move(cells);
    return j;
}

json diagnostics_json(const RegimeDiagnostics& diag, std::int64_t n, int d, double sigma,
                      const std::string& weight_label) {
    json j;
    j["n"] = n;
    j["d"] = d;
    j["sigma"] = sigma;
    j["weight"] = weight_label;
    j["p1"] = diag.p1;
    j["eta1"] = diag.p2.eta1;
    j["eta0"] = diag.p2.eta0;
    j["eta2"] = diag.p2.eta2;
    j["p3"] = diag.p3;
    if (diag.trace_ratio.has_value()) {
        j["trace_ratio"] = *diag.trace_ratio;
    } else {
        j["trace_ratio_error"] = "dense_path_cap";
        j["trace_ratio_note"] = diag.trace_ratio_note;
    }
    j["moment_ratio"] = diag.moment_ratio;
    j["snr"] = diag.snr;
    j["scalar_weight_gap"] = diag.scalar_weight_gap;
    j["suggested_regime"] = to_string(diag.suggested_regime);
    if (!diag.regime_note.empty()) j["regime_note"] = diag.regime_note;
    return j;
}

void write_power_report_csv(std::ostream& out, const PowerStudyReport& report,
                            const std::string& scenario, bool header) {
    if (header) out << "scenario,statistic,d,n,r,alpha,null_quantile,power,se,seed\n";
    for (const auto& cell : report.cells) {
        out << scenario << ',' << cell.statistic << ',' << report.d << ',' << report.n << ','
            << (std::isnan(cell.r) ? std::string("") : format_g17(cell.r)) << ','
            << format_g17(report.alpha) << ',' << format_g17(cell.null_quantile) << ','
            << format_g17(cell.empirical_power) << ',' << format_g17(cell.standard_error)
            << ',' << report.seed << '\n';
    }
}

}  // namespace mgof
