#include "multigof/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "multigof/distributions.hpp"
#include "multigof/io.hpp"
#include "multigof/numeric.hpp"
#include "multigof/simulation.hpp"

namespace mgof {

namespace {

using nlohmann::json;

double parse_number(const std::string& text, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        fail("parse", std::string("bad ") + what + " '" + text + "'");
    }
    if (pos != text.size()) fail("parse", std::string("bad ") + what + " '" + text + "'");
    return v;
}

int parse_int(const std::string& text, const char* what) {
    double v = parse_number(text, what);
    if (v != std::floor(v) || std::fabs(v) > 1e9) {
        fail("parse", std::string(what) + " must be an integer: '" + text + "'");
    }
    return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

// Resolves --out against MULTIGOF_OUT_DIR for relative paths.
std::string resolve_out_path(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("MULTIGOF_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return path;
    std::string base(dir);
    if (base.back() != '/') base.push_back('/');
    return base + path;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::filesystem::path resolved(resolve_out_path(out_path));
    if (resolved.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(resolved.parent_path(), ec);
    }
    std::ofstream f(resolved, std::ios::binary);
    if (!f) {
        throw Error("io", "cannot write '" + resolved.string() + "'", ErrorCategory::runtime);
    }
    f << text;
}

std::string test_result_csv(const TestResult& r) {
    std::ostringstream os;
    os << "statistic,calibration,critical_value,p_value,reject,alpha,n,d,weight_provenance\n";
    os << format_g17(r.statistic) << ',' << to_string(r.calibration) << ','
       << format_g17(r.critical_value) << ','
       << (r.p_value.has_value() ? format_g17(*r.p_value) : std::string("")) << ','
       << (r.reject ? "true" : "false") << ',' << format_g17(r.alpha) << ',' << r.n << ','
       << r.d << ',' << r.weight_provenance << '\n';
    return os.str();
}

struct FigureOptions {
    int which = 0;
    std::string scale = "full";
    std::uint64_t seed = 1;
    int reps = 0;        // 0 = preset default
    int n = 0;           // 0 = preset default
    int d = 0;           // 0 = preset default
    double r = 2.0;      // figure 3 alternative exponent
    double r0 = 0.0;     // figure 2: restrict to one panel (0 = both)
    std::string rgrid;   // figure 2: absolute r values
    std::string dgrid;   // figure 3: dimension grid
    int threads = 1;
    std::string format = "csv";
    std::string out;
};

std::string run_figure(const FigureOptions& opt) {
    std::ostringstream csv;
    json report = json::array();

    if (opt.which == 1) {
        std::int64_t n = opt.n > 0 ? opt.n : (opt.scale == "desk" ? 400 : 800);
        int d = opt.d > 0 ? opt.d : (opt.scale == "desk" ? 1000 : 4000);
        int reps = opt.reps > 0 ? opt.reps : (opt.scale == "desk" ? 500 : 1000);
        PowerStudyReport study = bias_demo(n, d, reps, opt.seed, 0.05, opt.threads);
        write_power_report_csv(csv, study, "figure1");
        report.push_back(power_report_json(study, "figure1"));
    } else if (opt.which == 2) {
        std::int64_t n = opt.n > 0 ? opt.n : 200;
        int d = opt.d > 0 ? opt.d : (opt.scale == "desk" ? 500 : 2000);
        int reps = opt.reps > 0 ? opt.reps : (opt.scale == "desk" ? 500 : 1000);
        std::vector<double> r0s = {1.0, 5.0};
        if (opt.r0 > 0.0) r0s = {opt.r0};
        bool first = true;
        for (std::size_t panel = 0; panel < r0s.size(); ++panel) {
            double r0 = r0s[panel];
            std::vector<double> rs;
            if (!opt.rgrid.empty()) {
                for (const auto& part : split(opt.rgrid, ',')) {
                    rs.push_back(parse_number(part, "r grid entry"));
                }
            } else {
                for (double m : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}) {
                    rs.push_back(m * r0);
                }
            }
            std::vector<Alternative> alts;
            for (double r : rs) {
                std::ostringstream label;
                label << "powerlaw:" << d << ":" << r;
                alts.push_back({label.str(), power_law(d, r), r});
            }
            PowerStudyConfig config{
                .null_pi = power_law(d, r0),
                .null_label = "powerlaw:" + std::to_string(d) + ":" + format_g17(r0),
                .alternatives = std::move(alts),
                .n = n,
                .reps = reps,
                .alpha = 0.05,
                .statistics = {{StatFamily::pearson, {}},
                               {StatFamily::u_stat, {WeightKind::pi0_inverse, 0.0}},
                               {StatFamily::u_stat, {WeightKind::identity, 0.0}},
                               {StatFamily::u_stat, {WeightKind::mixture, 0.5}},
                               {StatFamily::u_stat, {WeightKind::truncated, 0.0}}},
                .calibration = Calibration::monte_carlo,
                .seed = opt.seed + panel,
                .threads = opt.threads,
            };
            PowerStudyReport study = run_power_study(config);
            std::ostringstream scen;
            scen << "figure2:r0=" << r0;
            write_power_report_csv(csv, study, scen.str(), first);
            first = false;
            report.push_back(power_report_json(study, scen.str()));
        }
    } else if (opt.which == 3) {
        std::int64_t n = opt.n > 0 ? opt.n : 400;
        int reps = opt.reps > 0 ? opt.reps : (opt.scale == "desk" ? 500 : 1000);
        std::vector<int> dgrid;
        if (!opt.dgrid.empty()) {
            for (const auto& part : split(opt.dgrid, ',')) {
                dgrid.push_back(parse_int(part, "d grid entry"));
            }
        } else if (opt.scale == "desk") {
            dgrid = {100, 300, 500};
        } else {
            dgrid = {100, 300, 500, 700, 1000, 1500};
        }
        auto rows = theory_vs_empirical(n, dgrid, opt.r, reps, 0.05, opt.seed, opt.threads);
        csv << "scenario,statistic,d,n,r,alpha,null_quantile,power,se,seed\n";
        for (const auto& row : rows) {
            csv << "figure3," << row.statistic << ',' << row.d << ',' << n << ','
                << format_g17(opt.r) << ",0.05," << format_g17(row.null_quantile) << ','
                << format_g17(row.empirical) << ',' << format_g17(row.standard_error) << ','
                << opt.seed << '\n';
        }
        for (const auto& row : rows) {
            csv << "figure3_theory," << row.statistic << ',' << row.d << ',' << n << ','
                << format_g17(opt.r) << ",0.05," << format_g17(row.null_quantile) << ','
                << format_g17(row.theoretical) << ",0," << opt.seed << '\n';
        }
        json jrows = json::array();
        for (const auto& row : rows) {
            json jr;
            jr["d"] = row.d;
            jr["statistic"] = row.statistic;
            jr["empirical"] = row.empirical;
            jr["theoretical"] = row.theoretical;
            jr["null_quantile"] = row.null_quantile;
            jr["se"] = row.standard_error;
            jrows.push_back(std::move(jr));
        }
        json j;
        j["scenario"] = "figure3";
        j["config"] = {{"n", n},   {"r", opt.r},       {"reps", reps},
                       {"alpha", 0.05}, {"seed", opt.seed}, {"d_grid", dgrid}};
        j["rows"] = std::move(jrows);
        report.push_back(std::move(j));
    } else {
        fail("validation", "figure number must be 1, 2 or 3");
    }

    if (opt.format == "json") return dump_json_17(report) + "\n";
    return csv.str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace

ProbVector parse_dist_spec(const std::string& text) {
    if (text.rfind("unif:", 0) == 0) {
        return ProbVector::uniform(parse_int(text.substr(5), "dimension"));
    }
    if (text.rfind("powerlaw:", 0) == 0) {
        auto parts = split(text.substr(9), ':');
        if (parts.size() != 2) fail("parse", "powerlaw spec needs powerlaw:<d>:<r>");
        return power_law(parse_int(parts[0], "dimension"), parse_number(parts[1], "exponent"));
    }
    if (text.rfind("piecewise:", 0) == 0) {
        auto parts = split(text.substr(10), ':');
        if (parts.size() != 2) fail("parse", "piecewise spec needs piecewise:<d>:<omega1>");
        return piecewise_uniform(parse_int(parts[0], "dimension"),
                                 parse_number(parts[1], "omega1"));
    }
    if (text.rfind("file:", 0) == 0) return load_dist_csv(text.substr(5));
    return load_dist_csv(text);  // bare path
}

namespace {

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weighted U-statistic tests for multinomial goodness-of-fit"};
    app.require_subcommand(1);

    // --- test ---
    auto* test_cmd = app.add_subcommand("test", "Run one calibrated test on observed counts");
    std::string t_counts, t_samples, t_null, t_weight = "mixture:0.5", t_calib;
    std::string t_stat = "u:mixture:0.5", t_format = "json", t_out;
    double t_alpha = 0.05;
    int t_reps = 2000, t_threads = 1;
    std::uint64_t t_seed = 1;
    test_cmd->add_option("--counts", t_counts, "Counts CSV (bin,count)");
    test_cmd->add_option("--samples", t_samples, "Raw samples CSV (obs,bin)");
    test_cmd->add_option("--null", t_null, "Null distribution spec")->required();
    test_cmd->add_option("--weight", t_weight, "Weight spec for u-statistic calibrations");
    test_cmd->add_option("--calib", t_calib, "poisson | gaussian | chebyshev | monte_carlo")
        ->required();
    test_cmd->add_option("--alpha", t_alpha, "Significance level");
    test_cmd->add_option("--stat", t_stat, "Statistic spec for monte_carlo calibration");
    test_cmd->add_option("--reps", t_reps, "Null replicates for monte_carlo calibration");
    test_cmd->add_option("--seed", t_seed, "Random seed");
    test_cmd->add_option("--threads", t_threads, "Worker cap (does not affect output)");
    test_cmd->add_option("--format", t_format, "json | csv");
    test_cmd->add_option("--out", t_out, "Output path (default stdout)");

    // --- power ---
    auto* power_cmd = app.add_subcommand("power", "Monte Carlo power study");
    std::string p_null, p_stats = "pearson,u:pi0,u:identity,u:mixture:0.5,u:trunc";
    std::string p_calib = "monte_carlo", p_format = "csv", p_out;
    std::vector<std::string> p_alts;
    double p_alpha = 0.05;
    int p_n = 0, p_reps = 1000, p_threads = 1;
    std::uint64_t p_seed = 1;
    power_cmd->add_option("--null", p_null, "Null distribution spec")->required();
    power_cmd->add_option("--alt", p_alts, "Alternative spec (repeatable)")->required();
    power_cmd->add_option("--n", p_n, "Sample size")->required();
    power_cmd->add_option("--reps", p_reps, "Replicates per scenario");
    power_cmd->add_option("--alpha", p_alpha, "Significance level");
    power_cmd->add_option("--stats", p_stats, "Comma-separated statistic specs");
    power_cmd->add_option("--calib", p_calib, "Calibration");
    power_cmd->add_option("--seed", p_seed, "Random seed");
    power_cmd->add_option("--threads", p_threads, "Worker cap (does not affect output)");
    power_cmd->add_option("--format", p_format, "csv | json");
    power_cmd->add_option("--out", p_out, "Output path (default stdout)");

    // --- figure ---
    auto* fig_cmd = app.add_subcommand("figure", "Reproduce a simulation study preset");
    FigureOptions fig;
    fig_cmd->add_option("number", fig.which, "1 = bias demo, 2 = power comparison, 3 = theory")
        ->required();
    fig_cmd->add_option("--scale", fig.scale, "full | desk");
    fig_cmd->add_option("--seed", fig.seed, "Random seed");
    fig_cmd->add_option("--reps", fig.reps, "Replicates per scenario");
    fig_cmd->add_option("--n", fig.n, "Sample size override");
    fig_cmd->add_option("--d", fig.d, "Dimension override (figures 1-2)");
    fig_cmd->add_option("--r", fig.r, "Alternative exponent (figure 3)");
    fig_cmd->add_option("--r0", fig.r0, "Restrict figure 2 to one null exponent");
    fig_cmd->add_option("--rgrid", fig.rgrid, "Figure 2 alternative exponents, comma-separated");
    fig_cmd->add_option("--dgrid", fig.dgrid, "Figure 3 dimensions, comma-separated");
    fig_cmd->add_option("--threads", fig.threads, "Worker cap (does not affect output)");
    fig_cmd->add_option("--format", fig.format, "csv | json");
    fig_cmd->add_option("--out", fig.out, "Output path (default stdout)");

    // --- diagnose ---
    auto* diag_cmd = app.add_subcommand("diagnose", "Regime diagnostics for a design");
    std::string g_null, g_alt, g_weight = "identity", g_out;
    double g_sigma = 1.0;
    int g_n = 0;
    diag_cmd->add_option("--null", g_null, "Null distribution spec")->required();
    diag_cmd->add_option("--alt", g_alt, "Alternative distribution spec")->required();
    diag_cmd->add_option("--n", g_n, "Sample size")->required();
    diag_cmd->add_option("--weight", g_weight, "Weight spec");
    diag_cmd->add_option("--sigma", g_sigma, "Reference scale for the A - sigma*I gap");
    diag_cmd->add_option("--out", g_out, "Output path (default stdout)");

    // --- tvbound ---
    auto* tv_cmd = app.add_subcommand("tvbound", "Stein-Chen total-variation bound");
    std::string v_pi, v_out;
    int v_n = 0;
    tv_cmd->add_option("--pi", v_pi, "Sampling distribution spec")->required();
    tv_cmd->add_option("--n", v_n, "Sample size")->required();
    tv_cmd->add_option("--out", v_out, "Output path (default stdout)");

    // --- plan ---
    auto* plan_cmd = app.add_subcommand("plan", "Separation radius required by the minimax test");
    std::string n_out;
    int plan_d = 0, plan_n = 0;
    double plan_alpha = 0.05, plan_zeta = 0.05, plan_c = 1.0;
    plan_cmd->add_option("--d", plan_d, "Number of bins")->required();
    plan_cmd->add_option("--n", plan_n, "Sample size")->required();
    plan_cmd->add_option("--alpha", plan_alpha, "Size budget");
    plan_cmd->add_option("--zeta", plan_zeta, "Type II budget");
    plan_cmd->add_option("--C", plan_c, "Universal constant");
    plan_cmd->add_option("--out", n_out, "Output path (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (test_cmd->parsed()) {
        ProbVector pi0 = parse_dist_spec(t_null);
        CountVector counts = [&] {
            if (!t_counts.empty()) return load_counts_csv(t_counts);
            if (!t_samples.empty()) return load_samples_csv(t_samples, pi0.dim()).to_counts();
            fail("validation", "test needs --counts or --samples");
        }();
        Calibration calib = parse_calibration(t_calib);
        TestResult result = [&] {
            switch (calib) {
                case Calibration::poisson: return poisson_test(counts, pi0, t_alpha);
                case Calibration::gaussian:
                    return gaussian_test(counts, pi0,
                                         make_weight(parse_weight_spec(t_weight), pi0), t_alpha);
                case Calibration::chebyshev:
                    return minimax_test(counts, pi0,
                                        make_weight(parse_weight_spec(t_weight), pi0), t_alpha);
                case Calibration::monte_carlo:
                    return empirical_quantile_calibrated_test(
                        counts, pi0, parse_statistic_spec(t_stat), t_alpha, t_reps, t_seed,
                        t_threads);
            }
            fail("validation", "unknown calibration");
        }();
        std::string text = t_format == "csv" ? test_result_csv(result)
                                             : dump_json_17(test_result_json(result)) + "\n";
        emit(text, t_out, out);
        return 0;
    }

    if (power_cmd->parsed()) {
        ProbVector pi0 = parse_dist_spec(p_null);
        std::vector<Alternative> alts;
        for (const auto& spec : p_alts) {
            Alternative alt{spec, parse_dist_spec(spec)};
            if (spec.rfind("powerlaw:", 0) == 0) {
                auto parts = split(spec.substr(9), ':');
                if (parts.size() == 2) alt.r = parse_number(parts[1], "exponent");
            }
            alts.push_back(std::move(alt));
        }
        std::vector<StatisticSpec> kinds;
        for (const auto& name : split(p_stats, ',')) {
            kinds.push_back(parse_statistic_spec(name));
        }
        PowerStudyConfig config{
            .null_pi = std::move(pi0),
            .null_label = p_null,
            .alternatives = std::move(alts),
            .n = p_n,
            .reps = p_reps,
            .alpha = p_alpha,
            .statistics = std::move(kinds),
            .calibration = parse_calibration(p_calib),
            .seed = p_seed,
            .threads = p_threads,
        };
        PowerStudyReport study = run_power_study(config);
        std::string text;
        if (p_format == "json") {
            text = dump_json_17(power_report_json(study, "power")) + "\n";
        } else {
            std::ostringstream os;
            write_power_report_csv(os, study, "power");
            text = os.str();
        }
        emit(text, p_out, out);
        return 0;
    }

    if (fig_cmd->parsed()) {
        emit(run_figure(fig), fig.out, out);
        return 0;
    }

    if (diag_cmd->parsed()) {
        ProbVector pi0 = parse_dist_spec(g_null);
        ProbVector pi = parse_dist_spec(g_alt);
        WeightVector w = make_weight(parse_weight_spec(g_weight), pi0);
        RegimeDiagnostics diag = regime_diagnostics(pi, pi0, w, g_n, g_sigma);
        emit(dump_json_17(diagnostics_json(diag, g_n, pi0.dim(), g_sigma, g_weight)) + "\n",
             g_out, out);
        return 0;
    }

    if (tv_cmd->parsed()) {
        ProbVector pi = parse_dist_spec(v_pi);
        json j;
        j["tv_bound"] = tv_bound(pi, v_n);
        j["eta"] = poisson_reference(pi, pi, v_n).eta1;
        j["n"] = v_n;
        j["d"] = pi.dim();
        emit(dump_json_17(j) + "\n", v_out, out);
        return 0;
    }

    if (plan_cmd->parsed()) {
        SeparationPlan plan = separation_planner(plan_d, plan_n, plan_alpha, plan_zeta, plan_c);
        json j;
        j["eps_sq_required"] = plan.eps_sq_required;
        j["minimax_rate"] = plan.minimax_rate;
        j["d"] = plan_d;
        j["n"] = plan_n;
        j["alpha"] = plan_alpha;
        j["zeta"] = plan_zeta;
        j["C"] = plan_c;
        emit(dump_json_17(j) + "\n", n_out, out);
        return 0;
    }

    err << "error: no subcommand\n";
    return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const Error& e) {
        json j;
        j["error"] = {{"code", e.code()}, {"message", e.what()}};
        err << dump_json_17(j) << "\n";
        return e.category() == ErrorCategory::validation ? 2 : 1;
    } catch (const std::exception& e) {
        json j;
        j["error"] = {{"code", "internal"}, {"message", e.what()}};
        err << dump_json_17(j) << "\n";
        return 1;
    }
}

}  // namespace mgof
