#include "fracdiff.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "fracdiff/analysis_harness.hpp"
#include "fracdiff/config.hpp"
#include "fracdiff/error.hpp"
#include "fracdiff/fractional_calculus.hpp"
#include "fracdiff/special_functions.hpp"
#include "fracdiff/spectral_kernels.hpp"
#include "fracdiff/sweep.hpp"

using namespace fracdiff;

struct fd_ml_table {
    MittagLefflerTable table;
};
struct fd_grid {
    SpatialGrid grid;
};
struct fd_field {
    Field field;
};
struct fd_solve_job {
    SolveJob job;
};
struct fd_trajectory {
    Trajectory tr;
};
struct fd_manifest {
    Manifest m;
};
struct fd_sweep {
    SweepResult result;
};

namespace {

thread_local std::string last_error;

fd_status set_error(fd_status code, const std::string& msg) {
    last_error = msg;
    return code;
}

// Runs f, translating exceptions into status codes.
template <class F>
fd_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return FD_OK;
    } catch (const Error& e) {
        return set_error(static_cast<fd_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(FD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(FD_ERR_INTERNAL, e.what());
    }
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

TimeSeries series(const double* f, size_t n, double h) {
    need(f, "samples");
    require(n >= 2, "need at least 2 samples");
    return TimeSeries(TimeGrid(h, static_cast<int>(n) - 1), std::vector<double>(f, f + n));
}

void copy_out(const TimeSeries& s, double* out) {
    need(out, "out");
    std::memcpy(out, s.values.data(), s.values.size() * sizeof(double));
}

BetaIndex to_beta(fd_beta b) {
    switch (b) {
        case FD_BETA_ZERO: return BetaIndex::Zero;
        case FD_BETA_ALPHA: return BetaIndex::Alpha;
        case FD_BETA_ONE: return BetaIndex::One;
        case FD_BETA_ONE_PLUS_ALPHA: return BetaIndex::OnePlusAlpha;
        case FD_BETA_TWO: return BetaIndex::Two;
    }
    fail(ErrorCode::InvalidArgument, "unknown beta index");
}

}  // namespace

extern "C" {

const char* fd_version(void) { return kVersion; }
const char* fd_last_error(void) { return last_error.c_str(); }

const char* fd_status_name(fd_status status) {
    if (status == FD_OK) return "Ok";
    return error_code_name(static_cast<ErrorCode>(status));
}

void fd_string_free(char* s) { std::free(s); }

fd_status fd_ml_eval(double a, double beta, double x, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = eval_ml(a, beta, x);
    });
}

fd_status fd_ml_series(double a, double beta, double z, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = eval_ml_series(a, beta, z);
    });
}

fd_status fd_ml_asymptotic(double a, double beta, double z, int m, double parts[4]) {
    return guarded([&] {
        need(parts, "parts");
        MLQuery q;
        q.a = a;
        q.beta = beta;
        q.x = std::pow(z, a);
        q.m = m;
        const MLDecomposition d = eval_ml_asymptotic(q);
        parts[0] = d.oscillatory;
        parts[1] = d.algebraic;
        parts[2] = d.remainder;
        parts[3] = d.total;
    });
}

fd_status fd_ml_table_create(double a, double beta, double tol, fd_ml_table** out) {
    return guarded([&] {
        need(out, "out");
        *out = new fd_ml_table{MittagLefflerTable(a, beta, tol > 0.0 ? tol : 1e-12)};
    });
}

fd_status fd_ml_table_eval(const fd_ml_table* table, double x, double* out) {
    return guarded([&] {
        need(table, "table");
        need(out, "out");
        require(x >= 0.0, "x must be >= 0");
        *out = table->table(x);
    });
}

void fd_ml_table_destroy(fd_ml_table* table) { delete table; }

fd_status fd_rl_integral(const double* f, size_t n, double h, double beta, double* out) {
    return guarded([&] { copy_out(rl_integral(series(f, n, h), beta), out); });
}

fd_status fd_caputo_derivative(const double* u, size_t n, double h, double order, double* out) {
    return guarded([&] { copy_out(caputo_derivative(series(u, n, h), order), out); });
}

fd_status fd_rl_derivative(const double* u, size_t n, double h, double order, double* out) {
    return guarded([&] { copy_out(rl_derivative(series(u, n, h), order), out); });
}

fd_status fd_grid_create(int dim, int points, double half_width, fd_grid** out) {
    return guarded([&] {
        need(out, "out");
        *out = new fd_grid{SpatialGrid(dim, points, half_width)};
    });
}

size_t fd_grid_size(const fd_grid* grid) { return grid ? grid->grid.size() : 0; }

double fd_grid_coordinate(const fd_grid* grid, int index) {
    return grid ? grid->grid.coordinate(index) : 0.0;
}

void fd_grid_destroy(fd_grid* grid) { delete grid; }

fd_status fd_field_create(const fd_grid* grid, const double* values, fd_field** out) {
    return guarded([&] {
        need(grid, "grid");
        need(out, "out");
        Field f(grid->grid);
        if (values) std::memcpy(f.values.data(), values, f.values.size() * sizeof(double));
        *out = new fd_field{std::move(f)};
    });
}

fd_status fd_field_profile(const fd_grid* grid, const char* shape, double amplitude, double width,
                           int mode, fd_field** out) {
    return guarded([&] {
        need(grid, "grid");
        need(shape, "shape");
        need(out, "out");
        Profile p;
        p.shape = shape;
        p.amplitude = amplitude;
        p.width = width;
        p.mode = mode;
        *out = new fd_field{make_profile(p, grid->grid)};
    });
}

size_t fd_field_size(const fd_field* field) { return field ? field->field.values.size() : 0; }

const double* fd_field_values(const fd_field* field) {
    return field ? field->field.values.data() : nullptr;
}

fd_status fd_field_norm(const fd_field* field, double q, double* out) {
    return guarded([&] {
        need(field, "field");
        need(out, "out");
        *out = lq_norm(field->field, q);
    });
}

void fd_field_destroy(fd_field* field) { delete field; }

fd_status fd_kernel_build(const fd_grid* grid, double alpha, fd_beta beta, double t,
                          double laplacian_power, int gradient, int axis, fd_field** out) {
    return guarded([&] {
        need(grid, "grid");
        need(out, "out");
        KernelSpec spec;
        spec.alpha = FractionalOrder(alpha);
        spec.beta = to_beta(beta);
        spec.t = t;
        spec.laplacian_power = laplacian_power;
        spec.gradient = gradient != 0;
        auto fields = build_kernel(spec, grid->grid);
        const int component = spec.gradient ? axis : 0;
        require(component >= 0 && component < static_cast<int>(fields.size()),
                "axis out of range for the grid dimension");
        *out = new fd_field{std::move(fields[component])};
    });
}

fd_status fd_kernel_decomposition_error(const fd_grid* grid, double alpha, double* out) {
    return guarded([&] {
        need(grid, "grid");
        need(out, "out");
        *out = assemble_kernel_decomposition(FractionalOrder(alpha), grid->grid).max_rel_err;
    });
}

fd_status fd_kernel_scaling_check(const fd_grid* grid, double alpha, fd_beta beta, double p,
                                  double t1, double t2, double* out) {
    return guarded([&] {
        need(grid, "grid");
        need(out, "out");
        *out = scaling_check(FractionalOrder(alpha), to_beta(beta), p, t1, t2, grid->grid);
    });
}

fd_status fd_critical_exponents(int n, double alpha, double out[4]) {
    return guarded([&] {
        need(out, "out");
        const CriticalExponents c = critical_exponents(n, alpha);
        out[0] = c.p_bar;
        out[1] = c.p_tilde;
        out[2] = c.p_hat;
        out[3] = c.p_memory_crit;
    });
}

fd_status fd_q_scaling(int n, double alpha, double p, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = q_scaling(n, alpha, p);
    });
}

fd_status fd_theoretical_decay(const char* kind, int n, double alpha, double q, double delta,
                               double r, double eta, int allow_endpoint, double* out) {
    return guarded([&] {
        need(kind, "kind");
        need(out, "out");
        DecayScenario s;
        s.kind = parse_decay_case(kind);
        s.n = n;
        s.alpha = alpha;
        s.q = q;
        s.delta = delta;
        s.r = r;
        s.eta = eta;
        s.allow_endpoint = allow_endpoint != 0;
        *out = theoretical_decay(s);
    });
}

fd_status fd_decay_fit(const double* times, const double* norms, size_t n, double window,
                       double* exponent, double* residual) {
    return guarded([&] {
        need(times, "times");
        need(norms, "norms");
        const DecayFit f = decay_fit(std::vector<double>(times, times + n),
                                     std::vector<double>(norms, norms + n), window);
        if (exponent) *exponent = f.exponent;
        if (residual) *residual = f.residual;
    });
}

fd_status fd_integral_bound(double a, double b, double t, double* bound, double* quadrature) {
    return guarded([&] {
        if (bound) *bound = integral_bound(a, b, t);
        if (quadrature) *quadrature = envelope_integral(a, b, t);
    });
}

fd_status fd_solve_job_parse(const char* text, fd_solve_job** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new fd_solve_job{solve_job_from_config(parse_config(text))};
    });
}

fd_status fd_solve_job_load(const char* path, fd_solve_job** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new fd_solve_job{solve_job_from_config(load_config(path))};
    });
}

void fd_solve_job_destroy(fd_solve_job* job) { delete job; }

fd_status fd_solve_job_run(const fd_solve_job* job, fd_trajectory** out) {
    return guarded([&] {
        need(job, "job");
        need(out, "out");
        *out = new fd_trajectory{run_solve_job(job->job)};
    });
}

fd_solve_status fd_trajectory_status(const fd_trajectory* tr) {
    if (!tr) return FD_SOLVE_QUADRATURE_FAILURE;
    switch (tr->tr.status) {
        case SolveStatus::Completed: return FD_SOLVE_COMPLETED;
        case SolveStatus::Blowup: return FD_SOLVE_BLOWUP;
        case SolveStatus::QuadratureFailure: return FD_SOLVE_QUADRATURE_FAILURE;
    }
    return FD_SOLVE_QUADRATURE_FAILURE;
}

double fd_trajectory_blowup_time(const fd_trajectory* tr) {
    return tr ? tr->tr.blowup_time : 0.0;
}

size_t fd_trajectory_count(const fd_trajectory* tr) { return tr ? tr->tr.times.size() : 0; }

double fd_trajectory_time(const fd_trajectory* tr, size_t i) {
    return tr && i < tr->tr.times.size() ? tr->tr.times[i] : 0.0;
}

const double* fd_trajectory_values(const fd_trajectory* tr, size_t i, size_t* size) {
    if (!tr || i >= tr->tr.snapshots.size()) {
        if (size) *size = 0;
        return nullptr;
    }
    if (size) *size = tr->tr.snapshots[i].values.size();
    return tr->tr.snapshots[i].values.data();
}

fd_status fd_trajectory_norm(const fd_trajectory* tr, size_t i, double q, double* out) {
    return guarded([&] {
        need(tr, "trajectory");
        need(out, "out");
        require(i < tr->tr.snapshots.size(), "instant index out of range");
        *out = lq_norm(tr->tr.snapshots[i], q);
    });
}

fd_status fd_trajectory_norms_csv(const fd_trajectory* tr, const fd_solve_job* job, char** out) {
    return guarded([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = dup_string(norms_csv(tr->tr, job ? job->job.echo : std::string("# fracdiff")));
    });
}

fd_status fd_trajectory_snapshots_csv(const fd_trajectory* tr, const fd_solve_job* job,
                                      char** out) {
    return guarded([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = dup_string(snapshots_csv(tr->tr, job ? job->job.echo : std::string("# fracdiff")));
    });
}

void fd_trajectory_destroy(fd_trajectory* tr) { delete tr; }

fd_status fd_manifest_load(const char* path, fd_manifest** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new fd_manifest{load_manifest(path)};
    });
}

fd_status fd_manifest_parse(const char* text, fd_manifest** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new fd_manifest{manifest_from_config(parse_config(text))};
    });
}

const char* fd_manifest_output_dir(const fd_manifest* m) {
    return m ? m->m.output_dir.c_str() : "";
}

int fd_manifest_workers(const fd_manifest* m) { return m ? effective_workers(m->m) : 1; }

void fd_manifest_destroy(fd_manifest* m) { delete m; }

fd_status fd_sweep_run(const fd_manifest* m, int workers, fd_sweep** out) {
    return guarded([&] {
        need(m, "manifest");
        need(out, "out");
        *out = new fd_sweep{run_sweep(m->m, workers > 0 ? workers : effective_workers(m->m))};
    });
}

int fd_sweep_all_pass(const fd_sweep* s) { return s && s->result.all_pass ? 1 : 0; }

size_t fd_sweep_count(const fd_sweep* s) { return s ? s->result.reports.size() : 0; }

fd_status fd_sweep_write(const fd_sweep* s, const char* dir) {
    return guarded([&] {
        need(s, "sweep");
        need(dir, "dir");
        write_sweep_outputs(s->result, dir);
    });
}

fd_status fd_sweep_summary_json(const fd_sweep* s, char** out) {
    return guarded([&] {
        need(s, "sweep");
        need(out, "out");
        *out = dup_string(sweep_summary(s->result).dump(2));
    });
}

void fd_sweep_destroy(fd_sweep* s) { delete s; }

fd_status fd_report_render(const char* summary_path, int markdown, char** out, int* all_pass) {
    return guarded([&] {
        need(summary_path, "summary_path");
        need(out, "out");
        nlohmann::json summary;
        try {
            summary = nlohmann::json::parse(read_text_file(summary_path));
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorCode::Parse, std::string("summary: ") + e.what());
        }
        *out = dup_string(render_report(summary, markdown != 0));
        if (all_pass) *all_pass = summary.value("all_pass", false) ? 1 : 0;
    });
}

}  // extern "C"
