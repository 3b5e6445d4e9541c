#include "fracdiff/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "fracdiff/config.hpp"
#include "fracdiff/error.hpp"

namespace fracdiff {

using nlohmann::json;

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

const json& table(const json& node, const std::string& key) {
    static const json empty = json::object();
    auto it = node.find(key);
    if (it == node.end()) return empty;
    if (!it->is_object()) {
        fail(ErrorCode::Parse, "config key '" + key + "' must be a table");
    }
    return *it;
}

SpatialGrid grid_from(const json& node, const SpatialGrid& fallback) {
    return SpatialGrid(config_int(node, "dim", fallback.dim),
                       config_int(node, "points", fallback.points),
                       config_number(node, "half_width", fallback.half_width));
}

Profile profile_from(const json& node) {
    Profile p;
    p.shape = config_string(node, "shape", p.shape);
    p.amplitude = config_number(node, "amplitude", p.amplitude);
    p.width = config_number(node, "width", p.width);
    p.mode = config_int(node, "mode", p.mode);
    return p;
}

std::string q_text(double q) { return std::isinf(q) ? "inf" : format_number(q); }

bool safe_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

std::string profile_echo(const std::string& tag, const Profile& p) {
    return " " + tag + ".shape=" + p.shape + " " + tag + ".amplitude=" + format_number(p.amplitude) +
           " " + tag + ".width=" + format_number(p.width) + " " + tag +
           ".mode=" + std::to_string(p.mode);
}

std::string grid_echo(const SpatialGrid& g) {
    return " grid.dim=" + std::to_string(g.dim) + " grid.points=" + std::to_string(g.points) +
           " grid.half_width=" + format_number(g.half_width);
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

ScenarioConfig scenario_from_config(const json& node) {
    ScenarioConfig c;
    c.name = config_string(node, "name", "");
    if (!safe_name(c.name)) {
        fail(ErrorCode::Parse, "scenario name '" + c.name + "' must be non-empty [A-Za-z0-9_.-]");
    }
    c.grid = grid_from(table(node, "grid"), c.grid);
    DecayScenario& s = c.scenario;
    s.kind = parse_decay_case(config_string(node, "case", ""));
    s.n = config_int(node, "n", c.grid.dim);
    s.alpha = config_number(node, "alpha", s.alpha);
    s.q = config_number(node, "q", s.q);
    s.delta = config_number(node, "delta", s.delta);
    s.r = config_number(node, "r", s.r);
    s.eta = config_number(node, "eta", s.eta);
    s.allow_endpoint = config_bool(node, "allow_endpoint", s.allow_endpoint);
    c.h = config_number(node, "h", c.h);
    c.t_fit_lo = config_number(node, "t_fit_lo", c.t_fit_lo);
    c.t_fit_hi = config_number(node, "t_fit_hi", c.t_fit_hi);
    c.instants = config_int(node, "instants", c.instants);
    c.window = config_number(node, "window", c.window);
    c.tolerance = config_number(node, "tolerance", c.tolerance);
    c.power = config_number(node, "power", c.power);
    c.picard_sweeps = config_int(node, "picard_sweeps", c.picard_sweeps);
    c.data = profile_from(table(node, "data"));
    if (!(c.tolerance > 0.0)) {
        fail(ErrorCode::Parse, "scenario '" + c.name + "': tolerance must be > 0");
    }
    return c;
}

Manifest manifest_from_config(const json& root) {
    Manifest m;
    m.version = config_int(root, "version", 0);
    if (m.version != 1) {
        fail(ErrorCode::Parse, "manifest: version must be 1");
    }
    m.output_dir = config_string(root, "output_dir", m.output_dir);
    m.parallelism = config_int(root, "parallelism", m.parallelism);
    if (m.parallelism < 1) {
        fail(ErrorCode::Parse, "manifest: parallelism must be >= 1");
    }
    auto it = root.find("scenarios");
    if (it == root.end() || !it->is_array() || it->empty()) {
        fail(ErrorCode::Parse, "manifest: at least one [[scenarios]] entry is required");
    }
    std::set<std::string> names;
    for (const json& node : *it) {
        m.scenarios.push_back(scenario_from_config(node));
        if (!names.insert(m.scenarios.back().name).second) {
            fail(ErrorCode::Parse, "manifest: duplicate scenario name '" + m.scenarios.back().name + "'");
        }
    }
    return m;
}

Manifest load_manifest(const std::string& path) { return manifest_from_config(load_config(path)); }

int effective_workers(const Manifest& m) {
    int w = m.parallelism;
    if (const char* env = std::getenv(kMaxWorkersEnv)) {
        const int cap = std::atoi(env);
        if (cap >= 1) w = std::min(w, cap);
    }
    w = std::min<int>(w, static_cast<int>(m.scenarios.size()));
    return std::max(w, 1);
}

SweepResult run_sweep(const Manifest& m, int workers) {
    SweepResult out;
    out.reports.resize(m.scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < m.scenarios.size(); i = next++) {
            try {
                out.reports[i] = run_decay_scenario(m.scenarios[i]);
            } catch (const std::exception& e) {
                DecayReport r;
                r.config = m.scenarios[i];
                r.pass = false;
                r.note = e.what();
                out.reports[i] = std::move(r);
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(m.scenarios.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& r : out.reports) out.all_pass = out.all_pass && r.pass;
    return out;
}

std::string scenario_echo(const ScenarioConfig& c) {
    const DecayScenario& s = c.scenario;
    std::string e = std::string("# fracdiff ") + kVersion + " name=" + c.name +
                    " case=" + decay_case_name(s.kind) + " n=" + std::to_string(s.n) +
                    " alpha=" + format_number(s.alpha) + " q=" + q_text(s.q) +
                    " delta=" + format_number(s.delta) + " r=" + format_number(s.r) +
                    " eta=" + format_number(s.eta) +
                    " allow_endpoint=" + (s.allow_endpoint ? "true" : "false") +
                    " power=" + format_number(c.power) + " h=" + format_number(c.h) +
                    " t_fit_lo=" + format_number(c.t_fit_lo) + " t_fit_hi=" + format_number(c.t_fit_hi) +
                    " instants=" + std::to_string(c.instants) + " window=" + format_number(c.window) +
                    " tolerance=" + format_number(c.tolerance) +
                    " picard_sweeps=" + std::to_string(c.picard_sweeps) + grid_echo(c.grid) +
                    profile_echo("data", c.data);
    return e;
}

std::string series_csv(const DecayReport& r) {
    std::ostringstream os;
    os << scenario_echo(r.config) << "\n";
    const bool nl = !r.nonlinear_norms.empty();
    os << "t,norm" << (nl ? ",nonlinear_norm" : "") << "\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        os << format_number(r.times[i]) << "," << format_number(r.norms[i]);
        if (nl) os << "," << format_number(r.nonlinear_norms[i]);
        os << "\n";
    }
    return os.str();
}

std::string results_csv(const SweepResult& res) {
    std::ostringstream os;
    os << "# fracdiff " << kVersion << " scenarios=" << res.reports.size() << "\n";
    os << "name,case,n,alpha,q,status,theoretical_exponent,fitted_exponent,fit_residual,"
          "nonlinear_exponent,tolerance,pass\n";
    for (const auto& r : res.reports) {
        const auto& s = r.config.scenario;
        os << r.config.name << "," << decay_case_name(s.kind) << "," << s.n << ","
           << format_number(s.alpha) << "," << q_text(s.q) << ","
           << (r.note.empty() || !r.times.empty() ? solve_status_name(r.status) : "error") << ","
           << format_number(r.theoretical_exponent) << "," << format_number(r.fitted_exponent) << ","
           << format_number(r.fit_residual) << "," << format_number(r.nonlinear_exponent) << ","
           << format_number(r.config.tolerance) << "," << (r.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

json sweep_summary(const SweepResult& res) {
    json j;
    j["version"] = kVersion;
    j["all_pass"] = res.all_pass;
    j["scenarios"] = json::array();
    for (const auto& r : res.reports) {
        const auto& s = r.config.scenario;
        json e;
        e["name"] = r.config.name;
        e["case"] = decay_case_name(s.kind);
        e["n"] = s.n;
        e["alpha"] = s.alpha;
        e["q"] = std::isinf(s.q) ? json("inf") : json(s.q);
        e["status"] = solve_status_name(r.status);
        e["theoretical_exponent"] = r.theoretical_exponent;
        e["fitted_exponent"] = r.fitted_exponent;
        e["fit_residual"] = r.fit_residual;
        if (!r.nonlinear_norms.empty()) e["nonlinear_exponent"] = r.nonlinear_exponent;
        if (r.status == SolveStatus::Blowup) e["blowup_time"] = r.blowup_time;
        e["tolerance"] = r.config.tolerance;
        e["pass"] = r.pass;
        if (!r.note.empty()) e["note"] = r.note;
        j["scenarios"].push_back(e);
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::Io, "cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        fail(ErrorCode::Io, "write to '" + path + "' failed");
    }
}

void write_sweep_outputs(const SweepResult& res, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        fail(ErrorCode::Io, "cannot create '" + dir + "': " + ec.message());
    }
    const std::filesystem::path base(dir);
    for (const auto& r : res.reports) {
        if (!r.times.empty()) {
            write_text_file((base / (r.config.name + ".csv")).string(), series_csv(r));
        }
    }
    write_text_file((base / "results.csv").string(), results_csv(res));
    write_text_file((base / "summary.json").string(), sweep_summary(res).dump(2) + "\n");
}

std::string render_report(const json& summary, bool markdown) {
    auto it = summary.find("scenarios");
    if (it == summary.end() || !it->is_array()) {
        fail(ErrorCode::Parse, "report: summary has no scenarios array");
    }
    std::ostringstream os;
    char line[256];
    if (markdown) {
        os << "| scenario | case | theory | fitted | tol | status | result |\n";
        os << "|---|---|---|---|---|---|---|\n";
    } else {
        std::snprintf(line, sizeof line, "%-24s %-18s %9s %9s %6s %-10s %s\n", "scenario", "case",
                      "theory", "fitted", "tol", "status", "result");
        os << line;
    }
    int passed = 0;
    for (const json& e : *it) {
        const bool pass = e.value("pass", false);
        passed += pass;
        const std::string name = e.value("name", "?");
        const std::string kind = e.value("case", "?");
        const std::string status = e.value("status", "?");
        const double th = e.value("theoretical_exponent", 0.0);
        const double fit = e.value("fitted_exponent", 0.0);
        const double tol = e.value("tolerance", 0.0);
        if (markdown) {
            std::snprintf(line, sizeof line, "| %s | %s | %.4f | %.4f | %.3g | %s | %s |\n",
                          name.c_str(), kind.c_str(), th, fit, tol, status.c_str(),
                          pass ? "pass" : "FAIL");
        } else {
            std::snprintf(line, sizeof line, "%-24s %-18s %9.4f %9.4f %6.3g %-10s %s\n",
                          name.c_str(), kind.c_str(), th, fit, tol, status.c_str(),
                          pass ? "pass" : "FAIL");
        }
        os << line;
        if (e.contains("note")) os << (markdown ? "\n> " : "    note: ") << e["note"].get<std::string>() << "\n";
    }
    os << (markdown ? "\n" : "") << passed << "/" << it->size() << " scenarios pass\n";
    return os.str();
}

// ---------------------------------------------------------------------------

SolveJob solve_job_from_config(const json& root) {
    SolveJob job;
    CauchyProblem& p = job.problem;
    p.alpha = FractionalOrder(config_number(root, "alpha", 0.5));
    p.laplacian_power = config_number(root, "laplacian_power", 1.0);
    const SpatialGrid grid = grid_from(table(root, "grid"), SpatialGrid{});
    std::string echo = std::string("# fracdiff ") + kVersion + " alpha=" + format_number(p.alpha.alpha) +
                       " laplacian_power=" + format_number(p.laplacian_power) + grid_echo(grid);

    auto data = [&](const char* key) {
        if (!root.contains(key)) {
            echo += std::string(" ") + key + "=0";
            return Field(grid);
        }
        const Profile prof = profile_from(table(root, key));
        echo += profile_echo(key, prof);
        return make_profile(prof, grid);
    };
    p.u0 = data("u0");
    p.u1 = data("u1");

    const json& forcing = table(root, "forcing");
    const std::string kind = config_string(forcing, "kind", "none");
    echo += " forcing.kind=" + kind;
    if (kind == "fixed") {
        // f(t, x) = (1+t)^{-eta} profile(x)
        const Profile prof = profile_from(table(forcing, "profile"));
        const double eta = config_number(forcing, "eta", 2.0);
        echo += profile_echo("forcing.profile", prof) + " forcing.eta=" + format_number(eta);
        const Field shape = make_profile(prof, grid);
        p.forcing = ForcingKind::Fixed;
        p.bound_eta = eta;
        p.bound_k = lq_norm(shape, kInfinity);
        p.source = [shape, eta](double t) {
            Field f = shape;
            const double g = std::pow(1.0 + t, -eta);
            for (double& v : f.values) v *= g;
            return f;
        };
    } else if (kind == "semilinear") {
        p.forcing = ForcingKind::Semilinear;
        p.power = config_number(forcing, "power", 2.0);
        echo += " forcing.power=" + format_number(p.power);
    } else if (kind != "none") {
        fail(ErrorCode::Parse, "forcing.kind must be none, fixed or semilinear");
    }

    const json& time = table(root, "time");
    const double h = config_number(time, "h");
    const double t_end = config_number(time, "t_end");
    std::vector<double> outs;
    if (time.contains("outputs")) {
        if (!time["outputs"].is_array()) {
            fail(ErrorCode::Parse, "time.outputs must be an array of numbers");
        }
        for (const json& v : time["outputs"]) {
            if (!v.is_number()) fail(ErrorCode::Parse, "time.outputs must be an array of numbers");
            outs.push_back(v.get<double>());
        }
    } else {
        outs = log_spaced(config_number(time, "log_lo", std::min(1.0, t_end)), t_end,
                          config_int(time, "log_count", 24));
    }
    job.schedule = make_schedule(h, t_end, outs);
    echo += " time.h=" + format_number(h) + " time.t_end=" + format_number(t_end) +
            " time.outputs=" + std::to_string(job.schedule.output_nodes.size());

    const json& semi = table(root, "semilinear");
    job.options.blowup_threshold = config_number(semi, "blowup_threshold", 0.0);
    job.options.picard_sweeps = config_int(semi, "picard_sweeps", 1);
    if (p.forcing == ForcingKind::Semilinear) {
        echo += " semilinear.blowup_threshold=" + format_number(job.options.blowup_threshold) +
                " semilinear.picard_sweeps=" + std::to_string(job.options.picard_sweeps);
    }
    job.echo = echo;
    return job;
}

Trajectory run_solve_job(const SolveJob& job) {
    if (job.problem.forcing == ForcingKind::Semilinear) {
        return solve_semilinear(job.problem, job.schedule, job.options);
    }
    return solve_linear(job.problem, job.schedule);
}

std::string norms_csv(const Trajectory& tr, const std::string& echo) {
    std::ostringstream os;
    os << echo << " status=" << solve_status_name(tr.status);
    if (tr.status == SolveStatus::Blowup) os << " blowup_time=" << format_number(tr.blowup_time);
    os << "\n";
    const bool nl = !tr.nonlinear.empty();
    os << "t,l1,l2,linf" << (nl ? ",duhamel_l1,duhamel_l2,duhamel_linf" : "") << "\n";
    const auto n1 = tr.norms(1.0), n2 = tr.norms(2.0), ni = tr.norms(kInfinity);
    std::vector<double> d1, d2, di;
    if (nl) {
        d1 = tr.nonlinear_norms(1.0);
        d2 = tr.nonlinear_norms(2.0);
        di = tr.nonlinear_norms(kInfinity);
    }
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        os << format_number(tr.times[i]) << "," << format_number(n1[i]) << "," << format_number(n2[i])
           << "," << format_number(ni[i]);
        if (nl) {
            os << "," << format_number(d1[i]) << "," << format_number(d2[i]) << ","
               << format_number(di[i]);
        }
        os << "\n";
    }
    return os.str();
}

std::string snapshots_csv(const Trajectory& tr, const std::string& echo) {
    const SpatialGrid& g = tr.space;
    std::ostringstream os;
    os << echo << " status=" << solve_status_name(tr.status) << "\n";
    static const char* axes[] = {"x", "y", "z"};
    for (int d = 0; d < g.dim; ++d) os << "i" << axes[d] << ",";
    for (int d = 0; d < g.dim; ++d) os << axes[d] << ",";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        os << "u@" << format_number(tr.times[k]) << (k + 1 < tr.times.size() ? "," : "");
    }
    os << "\n";
    const int n = g.points;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        int index[3] = {0, 0, 0};
        std::size_t r = idx;
        for (int d = g.dim - 1; d >= 0; --d) {
            index[d] = static_cast<int>(r % n);
            r /= n;
        }
        for (int d = 0; d < g.dim; ++d) os << index[d] << ",";
        for (int d = 0; d < g.dim; ++d) os << format_number(g.coordinate(index[d])) << ",";
        for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
            os << format_number(tr.snapshots[k].values[idx]) << (k + 1 < tr.snapshots.size() ? "," : "");
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace fracdiff
