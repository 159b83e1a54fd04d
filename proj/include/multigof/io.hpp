#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "multigof/calibration.hpp"
#include "multigof/simulation.hpp"
#include "multigof/types.hpp"

namespace mgof {

/// Full-precision decimal rendering (17 significant digits), round-trip exact.
std::string format_g17(double v);

/// Serializes a JSON document with every floating-point number printed to
/// 17 significant digits.
std::string dump_json_17(const nlohmann::json& j, int indent = 2);

// CSV formats. Distributions and weights: header "bin,value", bins 1-indexed.
// Counts: header "bin,count". Raw samples: header "obs,bin".
// Loaders report parse errors with file line numbers; bins must be 1..d
// contiguous; distributions must sum to 1 within 1e-6 before renormalization.

ProbVector load_dist_csv(const std::string& path);
CountVector load_counts_csv(const std::string& path);
/// d = 0 infers the dimension from the largest bin seen.
SampleList load_samples_csv(const std::string& path, int d = 0);
WeightVector load_weight_csv(const std::string& path);

void write_dist_csv(std::ostream& out, const ProbVector& pi);
void write_counts_csv(std::ostream& out, const CountVector& counts);
void write_weight_csv(std::ostream& out, const WeightVector& w);

nlohmann::json test_result_json(const TestResult& result);
nlohmann::json power_report_json(const PowerStudyReport& report, const std::string& scenario);
nlohmann::json diagnostics_json(const RegimeDiagnostics& diag, std::int64_t n, int d,
                                double sigma, const std::string& weight_label);

/// Rows "scenario,statistic,d,n,r,alpha,null_quantile,power,se,seed".
void write_power_report_csv(std::ostream& out, const PowerStudyReport& report,
                            const std::string& scenario, bool header = true);

}  // namespace mgof
