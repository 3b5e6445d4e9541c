#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracdiff/analysis_harness.hpp"
#include "fracdiff/cauchy_solver.hpp"

namespace fracdiff {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable that caps the sweep worker count.
inline constexpr const char* kMaxWorkersEnv = "FRACDIFF_MAX_WORKERS";

struct Manifest {
    int version = 1;
    std::string output_dir = "fracdiff-out";
    int parallelism = 1;
    std::vector<ScenarioConfig> scenarios;
};

/// Scenario table keys: name, case, alpha, q, tolerance, delta, r, eta, allow_endpoint,
/// power, h, t_fit_lo, t_fit_hi, instants, window, picard_sweeps, [grid], [data].
ScenarioConfig scenario_from_config(const nlohmann::json& node);
Manifest manifest_from_config(const nlohmann::json& root);
Manifest load_manifest(const std::string& path);

/// min(parallelism, $FRACDIFF_MAX_WORKERS, scenario count), at least 1.
int effective_workers(const Manifest& m);

struct SweepResult {
    std::vector<DecayReport> reports;  // manifest order
    bool all_pass = true;
};

/// Runs every scenario. A scenario that throws yields a failing report whose note
/// carries the message; the others still run.
SweepResult run_sweep(const Manifest& m, int workers);

/// %.12e, with inf/nan spelled out; the only float format in CSV output.
std::string format_number(double v);

/// "# fracdiff <version> key=value ..." for a scenario.
std::string scenario_echo(const ScenarioConfig& c);

std::string series_csv(const DecayReport& r);
std::string results_csv(const SweepResult& r);
nlohmann::json sweep_summary(const SweepResult& r);

/// Writes <dir>/<name>.csv per scenario, <dir>/results.csv and <dir>/summary.json.
void write_sweep_outputs(const SweepResult& r, const std::string& dir);

/// Plain-text or markdown table from a summary produced by sweep_summary.
std::string render_report(const nlohmann::json& summary, bool markdown);

/// Problem file for a single solve: alpha, laplacian_power, [grid], [u0], [u1],
/// [forcing] (kind = none | fixed | semilinear), [time] (h, t_end, outputs or
/// log_lo/log_count, log-spaced up to t_end), [semilinear] (blowup_threshold, picard_sweeps).
struct SolveJob {
    CauchyProblem problem;
    TimeStepping schedule;
    SemilinearOptions options;
    std::string echo;  // "# fracdiff ..." parameter line
};

SolveJob solve_job_from_config(const nlohmann::json& root);
Trajectory run_solve_job(const SolveJob& job);

/// t, L1, L2, Linf (and the Duhamel part's for semilinear runs), one row per instant.
std::string norms_csv(const Trajectory& tr, const std::string& echo);
/// One row per grid point: indices, coordinates, then u at each stored instant.
std::string snapshots_csv(const Trajectory& tr, const std::string& echo);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace fracdiff
