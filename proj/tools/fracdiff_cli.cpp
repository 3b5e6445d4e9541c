// fracdiff command-line front end. Talks to the library through the C API only.
//
// Exit codes: 0 ok, 1 usage or I/O error, 2 validation failure (rejected input,
// failing scenario), 3 solve ended in blow-up.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracdiff.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBlowup = 3;

struct Failure {
    int code;
    std::string message;
};

void check(fd_status s) {
    if (s == FD_OK) return;
    const int code = s == FD_ERR_IO ? kExitUsage : kExitValidation;
    throw Failure{code, std::string(fd_status_name(s)) + ": " + fd_last_error()};
}

// Shortest round-trip form, always with a decimal point or exponent.
std::string show(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

double parse_q(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Failure{kExitUsage, "not a number: '" + s + "'"};
}

fd_beta parse_beta(const std::string& s) {
    if (s == "0") return FD_BETA_ZERO;
    if (s == "alpha") return FD_BETA_ALPHA;
    if (s == "1") return FD_BETA_ONE;
    if (s == "1+alpha") return FD_BETA_ONE_PLUS_ALPHA;
    if (s == "2") return FD_BETA_TWO;
    throw Failure{kExitUsage, "beta must be one of 0, alpha, 1, 1+alpha, 2"};
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw Failure{kExitUsage, "cannot write '" + path + "'"};
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string take_string(char* s) {
    std::string out(s ? s : "");
    fd_string_free(s);
    return out;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << text)) throw Failure{kExitUsage, "cannot write '" + p.string() + "'"};
}

// ---------------------------------------------------------------------------

struct MlArgs {
    double a = 1.5;
    double beta = 1.0;
    std::vector<double> x;
    std::string method = "auto";
    int m = 0;
};

int run_ml(const MlArgs& args) {
    const bool table = args.x.size() > 1;
    if (table) std::cout << "x,value\n";
    for (double x : args.x) {
        double v = 0.0;
        if (args.method == "series") {
            check(fd_ml_series(args.a, args.beta, -x, &v));
        } else if (args.method == "asymptotic") {
            double parts[4];
            check(fd_ml_asymptotic(args.a, args.beta, std::pow(x, 1.0 / args.a), args.m, parts));
            v = parts[3];
        } else {
            check(fd_ml_eval(args.a, args.beta, x, &v));
        }
        if (table) {
            std::cout << csv_number(x) << "," << csv_number(v) << "\n";
        } else {
            std::cout << show(v) << "\n";
        }
    }
    return 0;
}

struct FracArgs {
    std::string input;
    std::string op = "rl_integral";
    double order = 0.5;
    std::string output;
};

int run_frac(const FracArgs& args) {
    std::ifstream in(args.input);
    if (!in) throw Failure{kExitUsage, "cannot open '" + args.input + "'"};
    std::vector<double> t, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) {
            throw Failure{kExitValidation, "line " + std::to_string(lineno) + ": expected t,value"};
        }
        try {
            t.push_back(std::stod(a));
            v.push_back(std::stod(b));
        } catch (const std::exception&) {
            if (t.empty() && lineno <= 2) continue;  // header row
            throw Failure{kExitValidation, "line " + std::to_string(lineno) + ": not numeric"};
        }
    }
    if (t.size() < 2) throw Failure{kExitValidation, "need at least two samples"};
    const double h = t[1] - t[0];
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (std::abs(t[i] - (t[0] + h * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(t[i]))) {
            throw Failure{kExitValidation, "samples must be uniformly spaced"};
        }
    }
    if (std::abs(t[0]) > 1e-12) throw Failure{kExitValidation, "samples must start at t = 0"};
    std::vector<double> out(v.size());
    if (args.op == "rl_integral") {
        check(fd_rl_integral(v.data(), v.size(), h, args.order, out.data()));
    } else if (args.op == "caputo") {
        check(fd_caputo_derivative(v.data(), v.size(), h, args.order, out.data()));
    } else if (args.op == "rl_derivative") {
        check(fd_rl_derivative(v.data(), v.size(), h, args.order, out.data()));
    } else {
        throw Failure{kExitUsage, "op must be rl_integral, caputo or rl_derivative"};
    }
    Output o(args.output);
    o.stream() << "# fracdiff " << fd_version() << " op=" << args.op
               << " order=" << csv_number(args.order) << " h=" << csv_number(h)
               << " samples=" << v.size() << "\n";
    o.stream() << "t,value,result\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        o.stream() << csv_number(t[i]) << "," << csv_number(v[i]) << "," << csv_number(out[i]) << "\n";
    }
    return 0;
}

struct KernelArgs {
    double alpha = 0.5;
    std::string beta = "1";
    double t = 1.0;
    int dim = 1;
    int points = 256;
    double half_width = 32.0;
    double laplacian_power = 1.0;
    bool gradient = false;
    int axis = 0;
    std::vector<std::string> norms;
    std::string output;
};

int run_kernel(const KernelArgs& args) {
    fd_grid* grid = nullptr;
    check(fd_grid_create(args.dim, args.points, args.half_width, &grid));
    std::unique_ptr<fd_grid, decltype(&fd_grid_destroy)> g(grid, fd_grid_destroy);
    fd_field* field = nullptr;
    check(fd_kernel_build(grid, args.alpha, parse_beta(args.beta), args.t, args.laplacian_power,
                          args.gradient, args.axis, &field));
    std::unique_ptr<fd_field, decltype(&fd_field_destroy)> f(field, fd_field_destroy);

    Output o(args.output);
    std::ostream& os = o.stream();
    os << "# fracdiff " << fd_version() << " alpha=" << csv_number(args.alpha) << " beta=" << args.beta
       << " t=" << csv_number(args.t) << " laplacian_power=" << csv_number(args.laplacian_power)
       << " gradient=" << (args.gradient ? "true" : "false") << " axis=" << args.axis
       << " grid.dim=" << args.dim << " grid.points=" << args.points
       << " grid.half_width=" << csv_number(args.half_width) << "\n";
    if (!args.norms.empty()) {
        os << "q,norm\n";
        for (const auto& qs : args.norms) {
            const double q = parse_q(qs);
            double v = 0.0;
            check(fd_field_norm(field, q, &v));
            os << (std::isinf(q) ? std::string("inf") : csv_number(q)) << "," << csv_number(v) << "\n";
        }
        return 0;
    }
    // Slice along the first axis through the centre of the box.
    const double* values = fd_field_values(field);
    const std::size_t n = static_cast<std::size_t>(args.points);
    std::size_t offset = 0;
    std::size_t stride = 1;
    for (int d = args.dim - 1; d >= 1; --d) {
        offset += (n / 2) * stride;
        stride *= n;
    }
    os << "x,value\n";
    for (std::size_t i = 0; i < n; ++i) {
        os << csv_number(fd_grid_coordinate(grid, static_cast<int>(i))) << ","
           << csv_number(values[offset + i * stride]) << "\n";
    }
    return 0;
}

struct SolveArgs {
    std::string config;
    std::string output_dir = ".";
    std::string prefix;
    bool snapshots = true;
};

int run_solve(const SolveArgs& args) {
    fd_solve_job* job = nullptr;
    check(fd_solve_job_load(args.config.c_str(), &job));
    std::unique_ptr<fd_solve_job, decltype(&fd_solve_job_destroy)> j(job, fd_solve_job_destroy);
    fd_trajectory* tr = nullptr;
    check(fd_solve_job_run(job, &tr));
    std::unique_ptr<fd_trajectory, decltype(&fd_trajectory_destroy)> t(tr, fd_trajectory_destroy);

    const std::filesystem::path dir(args.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Failure{kExitUsage, "cannot create '" + dir.string() + "'"};
    const std::string prefix =
        args.prefix.empty() ? std::filesystem::path(args.config).stem().string() : args.prefix;

    char* text = nullptr;
    check(fd_trajectory_norms_csv(tr, job, &text));
    write_file(dir / (prefix + "_norms.csv"), take_string(text));
    if (args.snapshots) {
        check(fd_trajectory_snapshots_csv(tr, job, &text));
        write_file(dir / (prefix + "_snapshots.csv"), take_string(text));
    }
    switch (fd_trajectory_status(tr)) {
        case FD_SOLVE_COMPLETED:
            std::cout << "status completed, " << fd_trajectory_count(tr) << " instants\n";
            return 0;
        case FD_SOLVE_BLOWUP:
            std::cout << "status blowup at t = " << show(fd_trajectory_blowup_time(tr)) << "\n";
            return kExitBlowup;
        case FD_SOLVE_QUADRATURE_FAILURE:
            std::cerr << "status quadrature_failure\n";
            return kExitValidation;
    }
    return kExitValidation;
}

struct SweepArgs {
    std::string manifest;
    std::string output_dir;
    int workers = 0;
};

int run_sweep(const SweepArgs& args) {
    fd_manifest* m = nullptr;
    check(fd_manifest_load(args.manifest.c_str(), &m));
    std::unique_ptr<fd_manifest, decltype(&fd_manifest_destroy)> mh(m, fd_manifest_destroy);
    std::string dir = args.output_dir.empty() ? fd_manifest_output_dir(m) : args.output_dir;
    // A relative output_dir in the manifest is taken relative to the manifest.
    if (args.output_dir.empty() && std::filesystem::path(dir).is_relative()) {
        dir = (std::filesystem::path(args.manifest).parent_path() / dir).string();
    }
    int workers = fd_manifest_workers(m);
    if (args.workers > 0) workers = std::min(workers, args.workers);
    fd_sweep* s = nullptr;
    check(fd_sweep_run(m, workers, &s));
    std::unique_ptr<fd_sweep, decltype(&fd_sweep_destroy)> sh(s, fd_sweep_destroy);
    check(fd_sweep_write(s, dir.c_str()));

    const std::string summary = (std::filesystem::path(dir) / "summary.json").string();
    char* text = nullptr;
    int all_pass = 0;
    check(fd_report_render(summary.c_str(), 0, &text, &all_pass));
    std::cout << take_string(text);
    std::cout << "outputs in " << dir << "\n";
    return fd_sweep_all_pass(s) ? 0 : kExitValidation;
}

struct ReportArgs {
    std::string summary;
    bool markdown = false;
};

int run_report(const ReportArgs& args) {
    std::string path = args.summary;
    if (std::filesystem::is_directory(path)) path = (std::filesystem::path(path) / "summary.json").string();
    char* text = nullptr;
    int all_pass = 0;
    check(fd_report_render(path.c_str(), args.markdown ? 1 : 0, &text, &all_pass));
    std::cout << take_string(text);
    return all_pass ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional diffusion-wave numerics toolkit"};
    app.set_version_flag("--version", std::string(fd_version()));
    app.require_subcommand(1);

    MlArgs ml;
    auto* ml_cmd = app.add_subcommand("ml", "Evaluate E_{a,beta}(-x)");
    ml_cmd->add_option("--a", ml.a, "First index, in (1, 2]")->required();
    ml_cmd->add_option("--beta", ml.beta, "Second index")->required();
    ml_cmd->add_option("--x", ml.x, "Argument(s) x >= 0")->required()->delimiter(',');
    ml_cmd->add_option("--method", ml.method, "auto | series | asymptotic")
        ->check(CLI::IsMember({"auto", "series", "asymptotic"}));
    ml_cmd->add_option("--m", ml.m, "Asymptotic order (0 = smallest admissible)");

    FracArgs frac;
    auto* frac_cmd = app.add_subcommand("frac", "Fractional integral/derivative of sampled data");
    frac_cmd->add_option("--input", frac.input, "CSV with t,value rows on a uniform grid from 0")
        ->required();
    frac_cmd->add_option("--op", frac.op, "rl_integral | caputo | rl_derivative")
        ->check(CLI::IsMember({"rl_integral", "caputo", "rl_derivative"}));
    frac_cmd->add_option("--order", frac.order, "beta for rl_integral, j+alpha otherwise");
    frac_cmd->add_option("--output", frac.output, "Output CSV (default stdout)");

    KernelArgs kernel;
    auto* kernel_cmd = app.add_subcommand("kernel", "Solution kernel slices and norms");
    kernel_cmd->add_option("--alpha", kernel.alpha, "alpha in (0, 1)");
    kernel_cmd->add_option("--beta", kernel.beta, "0 | alpha | 1 | 1+alpha | 2");
    kernel_cmd->add_option("--t", kernel.t, "Time t > 0");
    kernel_cmd->add_option("--dim", kernel.dim, "Space dimension 1..3");
    kernel_cmd->add_option("--points", kernel.points, "Points per axis (power of two)");
    kernel_cmd->add_option("--half-width", kernel.half_width, "Box is [-L, L)^dim");
    kernel_cmd->add_option("--laplacian-power", kernel.laplacian_power, "Power of -Delta");
    kernel_cmd->add_flag("--gradient", kernel.gradient, "Gradient component instead");
    kernel_cmd->add_option("--axis", kernel.axis, "Gradient axis");
    kernel_cmd->add_option("--norms", kernel.norms, "Print L^q norms (e.g. 1,2,inf)")->delimiter(',');
    kernel_cmd->add_option("--output", kernel.output, "Output CSV (default stdout)");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a Cauchy problem from a problem file");
    solve_cmd->add_option("--config", solve.config, "Problem file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--output-dir", solve.output_dir, "Directory for CSV output");
    solve_cmd->add_option("--prefix", solve.prefix, "File prefix (default: config file stem)");
    solve_cmd->add_flag("!--no-snapshots", solve.snapshots, "Skip the snapshot CSV");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a manifest of decay scenarios");
    sweep_cmd->add_option("--manifest", sweep.manifest, "Manifest file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--output-dir", sweep.output_dir, "Override the manifest's output_dir");
    sweep_cmd->add_option("--workers", sweep.workers, "Further cap on the worker count");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Summarise a sweep's summary.json");
    report_cmd->add_option("--summary", report.summary, "summary.json or its directory")->required();
    report_cmd->add_flag("--markdown", report.markdown, "Markdown table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*ml_cmd) return run_ml(ml);
        if (*frac_cmd) return run_frac(frac);
        if (*kernel_cmd) return run_kernel(kernel);
        if (*solve_cmd) return run_solve(solve);
        if (*sweep_cmd) return run_sweep(sweep);
        if (*report_cmd) return run_report(report);
    } catch (const Failure& f) {
        std::cerr << "fracdiff: " << f.message << "\n";
        return f.code;
    }
    return kExitUsage;
}
