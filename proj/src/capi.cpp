#include "mfatopo/mfatopo.h"

#include "mfatopo/baseline.hpp"
#include "mfatopo/features.hpp"
#include "mfatopo/graph_io.hpp"
#include "mfatopo/parallel.hpp"
#include "mfatopo/synthetic.hpp"

#include <json.hpp>

#include <memory>
#include <new>
#include <string>

struct mfat_grid {
    mfatopo::GridData data;
};

struct mfat_model {
    mfatopo::MfaModel model;
};

struct mfat_graph {
    mfatopo::TopoGraph graph;
    mfatopo::MetricsReport metrics;
    std::vector<mfatopo::CriticalPoint> criticals;
    std::vector<mfatopo::Arc> arcs;
    std::vector<std::string> warnings;
};

namespace {

using namespace mfatopo;

thread_local std::string g_last_error;

mfat_status status_of(ErrorKind k) {
    switch (k) {
        case ErrorKind::Domain: return MFAT_E_DOMAIN;
        case ErrorKind::Order: return MFAT_E_ORDER;
        case ErrorKind::Fit: return MFAT_E_FIT;
        case ErrorKind::Parse: return MFAT_E_PARSE;
        case ErrorKind::Validation: return MFAT_E_VALIDATION;
        case ErrorKind::Io: return MFAT_E_IO;
        case ErrorKind::Degenerate: return MFAT_E_DEGENERATE;
        case ErrorKind::Usage: return MFAT_E_USAGE;
    }
    return MFAT_E_INTERNAL;
}

mfat_status fail(mfat_status s, std::string msg) {
    g_last_error = std::move(msg);
    return s;
}

template <typename Fn>
mfat_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return MFAT_OK;
    } catch (const Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(MFAT_E_PARSE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MFAT_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MFAT_E_INTERNAL, e.what());
    } catch (...) {
        return fail(MFAT_E_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* what) {
    if (!p) throw Error(ErrorKind::Usage, std::string(what) + " is null");
}

FeatureOptions to_options(const mfat_options* o) {
    FeatureOptions opt;
    if (!o) return opt;
    opt.step_divisor = o->step_divisor;
    opt.epsilon = o->epsilon;
    opt.gamma_factor = o->gamma_factor;
    opt.seeds_per_dim = o->seeds_per_dim;
    opt.threads = o->threads;
    opt.class_tolerance = o->class_tolerance;
    return opt;
}

mfat_metrics to_c(const MetricsReport& m) {
    return {m.e_max, m.e_avg, m.n_loop, m.n_cc, m.n_vertices, m.n_edges, m.wall_time};
}

void put_fit(mfat_fit_report* out, const FitReport& r) {
    if (out) *out = {r.rms_residual, r.max_residual, r.condition_estimate, r.regularized ? 1 : 0};
}

mfat_graph* wrap(FeatureResult&& r) {
    auto g = std::make_unique<mfat_graph>();
    g->metrics = measure(r.graph, stored_residuals(r.graph, r.graph.isovalue), r.wall_time);
    g->graph = std::move(r.graph);
    g->criticals = std::move(r.inserted);
    g->arcs = std::move(r.arcs);
    g->warnings = std::move(r.warnings);
    return g.release();
}

mfat_task task_of(const std::string& s) {
    if (s == "contour") return MFAT_CONTOUR;
    if (s == "jacobi") return MFAT_JACOBI;
    if (s == "ridge-valley") return MFAT_RIDGE_VALLEY;
    throw Error(ErrorKind::Usage, "unknown task '" + s + "' (contour, jacobi, ridge-valley)");
}

}  // namespace

extern "C" {

const char* mfat_version(void) { return "1.0.0"; }

const char* mfat_status_string(mfat_status s) {
    switch (s) {
        case MFAT_OK: return "ok";
        case MFAT_E_USAGE: return "usage error";
        case MFAT_E_IO: return "i/o error";
        case MFAT_E_PARSE: return "parse error";
        case MFAT_E_VALIDATION: return "validation error";
        case MFAT_E_DOMAIN: return "domain error";
        case MFAT_E_ORDER: return "order error";
        case MFAT_E_FIT: return "fit error";
        case MFAT_E_DEGENERATE: return "degenerate input";
        case MFAT_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* mfat_last_error(void) { return g_last_error.c_str(); }

int mfat_exit_code(mfat_status s) {
    switch (s) {
        case MFAT_OK: return 0;
        case MFAT_E_USAGE:
        case MFAT_E_ORDER: return 2;
        case MFAT_E_IO:
        case MFAT_E_PARSE:
        case MFAT_E_VALIDATION: return 3;
        case MFAT_E_DOMAIN:
        case MFAT_E_FIT:
        case MFAT_E_DEGENERATE: return 4;
        case MFAT_E_INTERNAL: return 1;
    }
    return 1;
}

int mfat_hardware_threads(void) { return hardware_threads(); }

void mfat_options_default(mfat_options* opt) {
    if (!opt) return;
    const FeatureOptions d;
    *opt = {d.step_divisor, d.epsilon, d.gamma_factor, d.seeds_per_dim, d.threads, d.class_tolerance};
}

mfat_status mfat_grid_load(const char* path, mfat_grid** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new mfat_grid{load_grid(path)};
    });
}

mfat_status mfat_grid_save(const mfat_grid* grid, const char* path) {
    return guarded([&] {
        need(grid, "grid");
        need(path, "path");
        save_grid(grid->data, path);
    });
}

mfat_status mfat_grid_synthetic(const char* name, int nx, int ny, mfat_grid** out) {
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        if (nx < 2 || ny < 2) throw Error(ErrorKind::Usage, "grid needs at least 2 samples per dimension");
        *out = new mfat_grid{make_grid(synthetic_from_string(name), nx, ny)};
    });
}

mfat_status mfat_grid_dims(const mfat_grid* grid, int* nx, int* ny) {
    return guarded([&] {
        need(grid, "grid");
        if (nx) *nx = grid->data.nx;
        if (ny) *ny = grid->data.ny;
    });
}

void mfat_grid_free(mfat_grid* grid) { delete grid; }

mfat_status mfat_model_fit(const mfat_grid* grid, int degree, int n1, int n2, mfat_model** out,
                           mfat_fit_report* report) {
    return guarded([&] {
        need(grid, "grid");
        need(out, "out");
        FitReport r;
        *out = new mfat_model{fit(grid->data, degree, n1, n2, &r)};
        put_fit(report, r);
    });
}

mfat_status mfat_model_fit_synthetic(const char* name, int degree, int samples_per_span, mfat_model** out,
                                     mfat_fit_report* report) {
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        FitReport r;
        *out = new mfat_model{fit_synthetic(synthetic_from_string(name), degree, samples_per_span, &r)};
        put_fit(report, r);
    });
}

mfat_status mfat_model_load(const char* path, mfat_model** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new mfat_model{load_model(path)};
    });
}

mfat_status mfat_model_save(const mfat_model* model, const char* path) {
    return guarded([&] {
        need(model, "model");
        need(path, "path");
        save_model(model->model, path);
    });
}

void mfat_model_free(mfat_model* model) { delete model; }

mfat_status mfat_model_info(const mfat_model* model, int* degree, int* spans_u, int* spans_v, double domain[4]) {
    return guarded([&] {
        need(model, "model");
        const MfaModel& m = model->model;
        if (degree) *degree = m.degree();
        if (spans_u) *spans_u = m.spans().count(0);
        if (spans_v) *spans_v = m.spans().count(1);
        if (domain) {
            domain[0] = m.domain().lo[0];
            domain[1] = m.domain().hi[0];
            domain[2] = m.domain().lo[1];
            domain[3] = m.domain().hi[1];
        }
    });
}

mfat_status mfat_model_evaluate(const mfat_model* model, double x1, double x2, int d1, int d2, double* out) {
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = model->model.evaluate({x1, x2}, d1, d2);
    });
}

mfat_status mfat_synthetic_spans(const char* name, int* spans_u, int* spans_v) {
    return guarded([&] {
        need(name, "name");
        const auto s = synthetic_spans(synthetic_from_string(name));
        if (spans_u) *spans_u = s[0];
        if (spans_v) *spans_v = s[1];
    });
}

mfat_status mfat_extract_contour(const mfat_model* f, double a, const mfat_options* opt, mfat_graph** out) {
    return guarded([&] {
        need(f, "model");
        need(out, "out");
        *out = wrap(extract_contour(f->model, a, to_options(opt)));
    });
}

mfat_status mfat_extract_jacobi(const mfat_model* f, const mfat_model* g, const mfat_options* opt,
                                mfat_graph** out) {
    return guarded([&] {
        need(f, "model f");
        need(g, "model g");
        need(out, "out");
        *out = wrap(extract_jacobi(f->model, g->model, to_options(opt)));
    });
}

mfat_status mfat_extract_ridge_valley(const mfat_model* f, const mfat_options* opt, mfat_graph** out) {
    return guarded([&] {
        need(f, "model");
        need(out, "out");
        *out = wrap(extract_ridge_valley(f->model, to_options(opt)));
    });
}

mfat_status mfat_baseline(mfat_task task, const mfat_model* f, const mfat_model* g, double a, int ratio,
                          int threads, mfat_graph** out) {
    return guarded([&] {
        need(f, "model f");
        need(out, "out");
        BaselineResult r;
        switch (task) {
            case MFAT_CONTOUR: r = pl_contour(f->model, a, ratio, threads); break;
            case MFAT_JACOBI:
                need(g, "model g");
                r = pl_jacobi(f->model, g->model, ratio, threads);
                break;
            case MFAT_RIDGE_VALLEY: r = pl_ridge_valley(f->model, ratio, threads); break;
            default: throw Error(ErrorKind::Usage, "unknown task");
        }
        auto h = std::make_unique<mfat_graph>();
        h->metrics = measure(r.graph, r.residuals, r.wall_time);
        h->graph = std::move(r.graph);
        *out = h.release();
    });
}

mfat_status mfat_graph_load(const char* path, mfat_graph** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto h = std::make_unique<mfat_graph>();
        h->graph = load_graph(path);
        h->metrics = measure(h->graph, stored_residuals(h->graph, h->graph.isovalue));
        if (!h->graph.labels.empty()) h->arcs = build_arcs(h->graph);
        *out = h.release();
    });
}

mfat_status mfat_graph_save(const mfat_graph* graph, const char* path) {
    return guarded([&] {
        need(graph, "graph");
        need(path, "path");
        save_graph(graph->graph, path);
    });
}

mfat_status mfat_graph_save_segments(const mfat_graph* graph, const char* path) {
    return guarded([&] {
        need(graph, "graph");
        need(path, "path");
        save_segments_csv(graph->graph, path);
    });
}

mfat_status mfat_graph_save_criticals(const mfat_graph* graph, const char* path) {
    return guarded([&] {
        need(graph, "graph");
        need(path, "path");
        write_critical_points_csv(graph->criticals, path);
    });
}

void mfat_graph_free(mfat_graph* graph) { delete graph; }

mfat_status mfat_graph_metrics(const mfat_graph* graph, mfat_metrics* out) {
    return guarded([&] {
        need(graph, "graph");
        need(out, "out");
        *out = to_c(graph->metrics);
    });
}

mfat_status mfat_graph_measure(const mfat_graph* graph, const mfat_model* f, const mfat_model* g,
                               mfat_metrics* out) {
    return guarded([&] {
        need(graph, "graph");
        need(f, "model f");
        need(out, "out");
        const TopoGraph& tg = graph->graph;
        Residuals r;
        switch (task_of(tg.task)) {
            case MFAT_CONTOUR: r = residuals(tg, ModelField(f->model), tg.isovalue); break;
            case MFAT_JACOBI:
                need(g, "model g");
                r = residuals(tg, JacobiField(f->model, g->model), 0.0);
                break;
            case MFAT_RIDGE_VALLEY: r = residuals(tg, RidgeValleyField(f->model), 0.0); break;
        }
        *out = to_c(measure(tg, r, graph->metrics.wall_time));
    });
}

mfat_status mfat_graph_task(const mfat_graph* graph, mfat_task* task, double* isovalue) {
    return guarded([&] {
        need(graph, "graph");
        if (task) *task = task_of(graph->graph.task);
        if (isovalue) *isovalue = graph->graph.isovalue;
    });
}

mfat_status mfat_graph_size(const mfat_graph* graph, size_t* n_vertices, size_t* n_edges) {
    return guarded([&] {
        need(graph, "graph");
        if (n_vertices) *n_vertices = graph->graph.num_vertices();
        if (n_edges) *n_edges = graph->graph.num_edges();
    });
}

mfat_status mfat_graph_vertex(const mfat_graph* graph, size_t index, double* x1, double* x2, double* value,
                              mfat_vertex_kind* kind, mfat_arc_class* label) {
    return guarded([&] {
        need(graph, "graph");
        const TopoGraph& g = graph->graph;
        if (index >= g.num_vertices()) throw Error(ErrorKind::Usage, "vertex index out of range");
        const GraphVertex& v = g.vertices()[index];
        if (x1) *x1 = v.position[0];
        if (x2) *x2 = v.position[1];
        if (value) *value = v.value;
        if (kind) *kind = static_cast<mfat_vertex_kind>(v.kind);
        if (label)
            *label = static_cast<mfat_arc_class>(index < g.labels.size() ? g.labels[index] : ArcClass::Unclassified);
    });
}

mfat_status mfat_graph_edge(const mfat_graph* graph, size_t index, int* a, int* b) {
    return guarded([&] {
        need(graph, "graph");
        if (index >= graph->graph.num_edges()) throw Error(ErrorKind::Usage, "edge index out of range");
        const auto& e = graph->graph.edges()[index];
        if (a) *a = e.first;
        if (b) *b = e.second;
    });
}

mfat_status mfat_graph_arc_count(const mfat_graph* graph, mfat_arc_class label, size_t* count) {
    return guarded([&] {
        need(graph, "graph");
        need(count, "count");
        std::size_t n = 0;
        for (const auto& arc : graph->arcs) n += static_cast<int>(arc.label) == static_cast<int>(label);
        *count = n;
    });
}

size_t mfat_graph_warning_count(const mfat_graph* graph) { return graph ? graph->warnings.size() : 0; }

const char* mfat_graph_warning(const mfat_graph* graph, size_t index) {
    if (!graph || index >= graph->warnings.size()) return nullptr;
    return graph->warnings[index].c_str();
}

const char* mfat_task_string(mfat_task task) {
    switch (task) {
        case MFAT_CONTOUR: return "contour";
        case MFAT_JACOBI: return "jacobi";
        case MFAT_RIDGE_VALLEY: return "ridge-valley";
    }
    return "unknown";
}

mfat_status mfat_task_from_string(const char* name, mfat_task* out) {
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        *out = task_of(name);
    });
}

const char* mfat_arc_class_string(mfat_arc_class label) { return to_string(static_cast<ArcClass>(label)); }

}  // extern "C"
