#include "multigof/cli.hpp"
#include "multigof/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "multigof/distributions.hpp"
#include "multigof/numeric.hpp"
#include "multigof/simulation.hpp"

namespace {

using namespace mgof;
using nlohmann::json;

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("multigof_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    int status = run_cli(args, out, err);
    if (out_text != nullptr) *out_text = out.str();
    if (err_text != nullptr) *err_text = err.str();
    return status;
}

TEST(CountsCsv, LoadAndErrors) {
    TempDir dir;
    std::string good = dir.file("c.csv");
    write_file(good, "bin,count\n1,3\n2,1\n");
    CountVector counts = load_counts_csv(good);
    EXPECT_EQ(counts.dim(), 2);
    EXPECT_EQ(counts.n(), 4);

    std::string missing = dir.file("missing.csv");
    write_file(missing, "bin,count\n1,3\n3,1\n");
    try {
        load_counts_csv(missing);
        FAIL() << "expected parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "parse");
        EXPECT_NE(std::string(e.what()).find("bin 2"), std::string::npos);
    }

    std::string dup = dir.file("dup.csv");
    write_file(dup, "bin,count\n1,3\n1,1\n");
    EXPECT_THROW(load_counts_csv(dup), Error);

    std::string negative = dir.file("neg.csv");
    write_file(negative, "bin,count\n1,3\n2,-1\n");
    try {
        load_counts_csv(negative);
        FAIL() << "expected parse error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);  // row number
    }
}

TEST(DistCsv, ToleranceRuleAndRoundTrip) {
    TempDir dir;
    std::string near_one = dir.file("near.csv");
    write_file(near_one, "bin,value\n1,0.4999995\n2,0.5\n");
    ProbVector p = load_dist_csv(near_one);  // renormalized
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);

    std::string off = dir.file("off.csv");
    write_file(off, "bin,value\n1,0.4\n2,0.5\n");
    EXPECT_THROW(load_dist_csv(off), Error);

    // Bitwise round trip through full-precision CSV.
    ProbVector original = power_law(37, 1.7);
    std::string path = dir.file("rt.csv");
    {
        std::ofstream f(path, std::ios::binary);
        write_dist_csv(f, original);
    }
    ProbVector reloaded = load_dist_csv(path);
    ASSERT_EQ(reloaded.dim(), original.dim());
    for (int j = 0; j < original.dim(); ++j) {
        EXPECT_EQ(reloaded[j], original[j]) << "bin " << j;
    }
}

TEST(CountsCsv, RoundTripBitwise) {
    TempDir dir;
    RngStream rng(4);
    CountVector counts = sample_counts(power_law(25, 2.0), 300, rng);
    std::string path = dir.file("counts.csv");
    {
        std::ofstream f(path, std::ios::binary);
        write_counts_csv(f, counts);
    }
    EXPECT_EQ(load_counts_csv(path).counts(), counts.counts());
}

TEST(SamplesCsv, LoadsAndValidates) {
    TempDir dir;
    std::string path = dir.file("s.csv");
    write_file(path, "obs,bin\n1,2\n2,2\n3,1\n");
    SampleList samples = load_samples_csv(path, 3);
    EXPECT_EQ(samples.size(), 3);
    CountVector counts = samples.to_counts();
    EXPECT_EQ(counts[0], 1);
    EXPECT_EQ(counts[1], 2);
    EXPECT_EQ(counts[2], 0);

    std::string dup = dir.file("sdup.csv");
    write_file(dup, "obs,bin\n1,2\n1,1\n");
    EXPECT_THROW(load_samples_csv(dup), Error);
}

TEST(WeightCsv, RoundTrip) {
    TempDir dir;
    WeightVector w = mixture_weight(power_law(9, 1.0), 0.3);
    std::string path = dir.file("w.csv");
    {
        std::ofstream f(path, std::ios::binary);
        write_weight_csv(f, w);
    }
    WeightVector reloaded = load_weight_csv(path);
    for (int j = 0; j < w.dim(); ++j) EXPECT_EQ(reloaded[j], w[j]);
}

TEST(Json17, FullPrecisionNumbers) {
    json j;
    j["x"] = 0.1;
    j["i"] = 42;
    std::string text = dump_json_17(j, 0);
    EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
    EXPECT_NE(text.find("42"), std::string::npos);
    EXPECT_EQ(json::parse(text)["x"].get<double>(), 0.1);
}

TEST(DistSpec, Grammar) {
    EXPECT_EQ(parse_dist_spec("unif:7").dim(), 7);
    ProbVector p = parse_dist_spec("powerlaw:4:1");
    EXPECT_NEAR(p[3], 0.4, 1e-15);
    ProbVector pw = parse_dist_spec("piecewise:4:0.5");
    EXPECT_NEAR(pw[2], 0.375, 1e-15);
    EXPECT_THROW(parse_dist_spec("powerlaw:4"), Error);
    EXPECT_THROW(parse_dist_spec("unif:zero"), Error);
}

TEST(Cli, TestVerbProducesSchemaValidJson) {
    TempDir dir;
    std::string counts = dir.file("c.csv");
    write_file(counts, "bin,count\n1,3\n2,1\n");
    std::string null_file = dir.file("p.csv");
    write_file(null_file, "bin,value\n1,0.5\n2,0.5\n");

    std::string out;
    int status = run({"test", "--counts", counts, "--null", null_file, "--weight",
                      "mixture:0.5", "--calib", "chebyshev", "--alpha", "0.05"},
                     &out);
    EXPECT_EQ(status, 0);
    json j = json::parse(out);
    for (const char* field : {"statistic", "calibration", "critical_value", "reject", "alpha",
                              "n", "d", "weight_provenance"}) {
        EXPECT_TRUE(j.contains(field)) << field;
    }
    EXPECT_EQ(j["calibration"], "chebyshev");
    EXPECT_FALSE(j.contains("p_value"));  // chebyshev carries no p-value
    EXPECT_EQ(j["n"], 4);

    // Exit status never encodes reject/accept.
    std::string out2;
    status = run({"test", "--counts", counts, "--null", null_file, "--calib", "poisson"},
                 &out2);
    EXPECT_EQ(status, 0);
    json j2 = json::parse(out2);
    EXPECT_TRUE(j2.contains("p_value"));
}

TEST(Cli, UnknownOptionIsAnError) {
    std::string err;
    int status = run({"test", "--counts", "x.csv", "--null", "unif:4", "--calib", "poisson",
                      "--bogus", "1"},
                     nullptr, &err);
    EXPECT_EQ(status, 2);
    EXPECT_FALSE(err.empty());
}

TEST(Cli, ValidationAndRuntimeExitCodes) {
    // Unparseable spec: validation error -> 2 with a machine-readable code.
    std::string err;
    int status = run({"tvbound", "--pi", "powerlaw:bad:1", "--n", "50"}, nullptr, &err);
    EXPECT_EQ(status, 2);
    json j = json::parse(err);
    EXPECT_EQ(j["error"]["code"], "parse");

    // Missing file: runtime error -> 1.
    status = run({"test", "--counts", "/nonexistent/path.csv", "--null", "unif:4", "--calib",
                  "poisson"},
                 nullptr, &err);
    EXPECT_EQ(status, 1);
}

TEST(Cli, FigureRunsAreByteIdentical) {
    TempDir dir;
    std::string out1 = dir.file("fig.csv");
    std::string out2 = dir.file("fig2.csv");
    std::vector<std::string> base = {"figure", "2",      "--scale", "desk",  "--reps", "100",
                                     "--seed", "7",      "--d",     "60",    "--n",    "40",
                                     "--rgrid", "0.5,2.0"};
    std::vector<std::string> a = base;
    a.insert(a.end(), {"--out", out1});
    std::vector<std::string> b = base;
    b.insert(b.end(), {"--out", out2});
    EXPECT_EQ(run(a), 0);
    EXPECT_EQ(run(b), 0);
    std::ifstream f1(out1, std::ios::binary);
    std::ifstream f2(out2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    EXPECT_EQ(s1.str(), s2.str());
    EXPECT_NE(s1.str().find("scenario,statistic,d,n,r,alpha,null_quantile,power,se,seed"),
              std::string::npos);
}

TEST(Cli, OutDirEnvVarRedirectsRelativePaths) {
    TempDir dir;
    ::setenv("MULTIGOF_OUT_DIR", dir.file("reports").c_str(), 1);
    int status = run({"plan", "--d", "100", "--n", "50", "--out", "plan.json"});
    ::unsetenv("MULTIGOF_OUT_DIR");
    EXPECT_EQ(status, 0);
    std::ifstream f(dir.file("reports") + "/plan.json");
    EXPECT_TRUE(f.good());
}

TEST(Cli, DiagnoseAndPlanEmitExpectedFields) {
    std::string out;
    int status = run({"diagnose", "--null", "unif:100", "--alt", "unif:100", "--n", "20",
                      "--weight", "identity", "--sigma", "1"},
                     &out);
    EXPECT_EQ(status, 0);
    json j = json::parse(out);
    for (const char* field : {"p1", "eta0", "eta1", "eta2", "p3", "trace_ratio",
                              "moment_ratio", "snr", "scalar_weight_gap", "suggested_regime"}) {
        EXPECT_TRUE(j.contains(field)) << field;
    }
    // p1 = 2 n^3 / d^2 = 2 * 8000 / 10000 = 1.6 here
    EXPECT_NEAR(j["p1"].get<double>(), 1.6, 1e-12);

    status = run({"plan", "--d", "10000", "--n", "1000", "--alpha", "0.05", "--zeta", "0.05"},
                 &out);
    EXPECT_EQ(status, 0);
    json pj = json::parse(out);
    EXPECT_NEAR(pj["eps_sq_required"].get<double>(), 2.4472135954999579, 1e-9);
    EXPECT_NEAR(pj["minimax_rate"].get<double>(), 0.31622776601683794, 1e-12);
}

TEST(Cli, TvboundMatchesLibrary) {
    std::string out;
    int status = run({"tvbound", "--pi", "unif:10000", "--n", "200"}, &out);
    EXPECT_EQ(status, 0);
    json j = json::parse(out);
    EXPECT_NEAR(j["tv_bound"].get<double>(), tv_bound(ProbVector::uniform(10000), 200), 1e-15);
    EXPECT_NEAR(j["eta"].get<double>(), 1.99, 1e-12);
}

TEST(Cli, TestVerbAcceptsRawSamples) {
    TempDir dir;
    std::string samples = dir.file("s.csv");
    write_file(samples, "obs,bin\n1,1\n2,1\n3,2\n4,2\n");
    std::string out;
    int status = run({"test", "--samples", samples, "--null", "unif:4", "--calib", "poisson"},
                     &out);
    EXPECT_EQ(status, 0);
    json j = json::parse(out);
    EXPECT_EQ(j["n"], 4);
    EXPECT_EQ(j["d"], 4);
    EXPECT_EQ(j["statistic"], 2.0);  // two colliding pairs

    std::string err;
    status = run({"test", "--null", "unif:4", "--calib", "poisson"}, nullptr, &err);
    EXPECT_EQ(status, 2);  // neither --counts nor --samples
}

TEST(Cli, PowerVerbChebyshevCalibration) {
    std::string out;
    int status = run({"power", "--null", "powerlaw:40:1", "--alt", "powerlaw:40:3", "--n",
                      "100", "--reps", "200", "--stats", "u:mixture:0.5", "--calib",
                      "chebyshev", "--seed", "2", "--format", "json"},
                     &out);
    EXPECT_EQ(status, 0);
    json j = json::parse(out);
    ProbVector pi0 = power_law(40, 1.0);
    WeightVector w = mixture_weight(pi0, 0.5);
    std::vector<double> a = w.inverse();
    double expected = std::sqrt(trace_weighted_sq(pi0, a) / (0.05 * binom2(100)));
    EXPECT_NEAR(j["cells"][0]["null_quantile"].get<double>(), expected, 1e-12);
}

TEST(Cli, PowerVerbEmitsCsv) {
    std::string out;
    int status = run({"power", "--null", "powerlaw:50:1", "--alt", "powerlaw:50:2", "--n",
                      "60", "--reps", "150", "--stats", "pearson,u:identity", "--seed", "3"},
                     &out);
    EXPECT_EQ(status, 0);
    EXPECT_NE(out.find("power,pearson,50,60,2,"), std::string::npos);
    EXPECT_NE(out.find("power,u:identity,50,60,2,"), std::string::npos);
}

TEST(Cli, SchemaDocumentsMatchEmittedReports) {
    // Structural check of the shipped schemas: required fields exist with the
    // declared types.
    auto check = [](const json& schema, const json& doc) {
        ASSERT_TRUE(schema.contains("required"));
        for (const auto& field : schema["required"]) {
            EXPECT_TRUE(doc.contains(field.get<std::string>()))
                << "missing " << field.get<std::string>();
        }
        for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
            if (!doc.contains(it.key())) continue;
            std::string type = it.value()["type"].get<std::string>();
            const json& v = doc[it.key()];
            if (type == "number") EXPECT_TRUE(v.is_number()) << it.key();
            if (type == "integer") EXPECT_TRUE(v.is_number_integer()) << it.key();
            if (type == "string") EXPECT_TRUE(v.is_string()) << it.key();
            if (type == "boolean") EXPECT_TRUE(v.is_boolean()) << it.key();
            if (type == "array") EXPECT_TRUE(v.is_array()) << it.key();
            if (type == "object") EXPECT_TRUE(v.is_object()) << it.key();
        }
    };

    std::ifstream ts(std::string(MULTIGOF_SOURCE_DIR) + "/docs/schemas/test_result.schema.json");
    ASSERT_TRUE(ts.good());
    json test_schema = json::parse(ts);

    TempDir dir;
    std::string counts = dir.file("c.csv");
    write_file(counts, "bin,count\n1,3\n2,1\n");
    std::string out;
    run({"test", "--counts", counts, "--null", "unif:2", "--calib", "gaussian", "--weight",
         "identity"},
        &out);
    check(test_schema, json::parse(out));

    std::ifstream ps(std::string(MULTIGOF_SOURCE_DIR) +
                     "/docs/schemas/power_report.schema.json");
    ASSERT_TRUE(ps.good());
    json power_schema = json::parse(ps);
    run({"power", "--null", "unif:20", "--alt", "powerlaw:20:2", "--n", "30", "--reps", "120",
         "--stats", "collision", "--format", "json", "--seed", "5"},
        &out);
    check(power_schema, json::parse(out));

    std::ifstream ds(std::string(MULTIGOF_SOURCE_DIR) +
                     "/docs/schemas/diagnostics.schema.json");
    ASSERT_TRUE(ds.good());
    json diag_schema = json::parse(ds);
    run({"diagnose", "--null", "powerlaw:50:1", "--alt", "powerlaw:50:2", "--n", "40",
         "--weight", "mixture:0.5", "--sigma", "1"},
        &out);
    check(diag_schema, json::parse(out));
}

}  // namespace
