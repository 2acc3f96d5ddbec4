// mfatopo command-line tool. Talks to the library only through mfatopo.h.
#include "mfatopo/mfatopo.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Failure {
    mfat_status status;
    std::string message;
};

void check(mfat_status s, const std::string& context = "") {
    if (s == MFAT_OK) return;
    std::string msg = mfat_last_error();
    if (!context.empty()) msg = context + ": " + msg;
    throw Failure{s, msg};
}

void usage_error(const std::string& msg) { throw Failure{MFAT_E_USAGE, msg}; }

struct ModelDeleter {
    void operator()(mfat_model* m) const { mfat_model_free(m); }
};
struct GraphDeleter {
    void operator()(mfat_graph* g) const { mfat_graph_free(g); }
};
struct GridDeleter {
    void operator()(mfat_grid* g) const { mfat_grid_free(g); }
};
using Model = std::unique_ptr<mfat_model, ModelDeleter>;
using Graph = std::unique_ptr<mfat_graph, GraphDeleter>;
using Grid = std::unique_ptr<mfat_grid, GridDeleter>;

// A model given either as a file or as the name of a synthetic reference field.
struct ModelSource {
    std::string path;
    std::string synthetic;
    int samples_per_span = 8;

    bool given() const { return !path.empty() || !synthetic.empty(); }
    Model load(const char* role) const {
        if (!path.empty() && !synthetic.empty()) usage_error(std::string(role) + ": give a model file or a synthetic name, not both");
        mfat_model* m = nullptr;
        if (!synthetic.empty()) {
            check(mfat_model_fit_synthetic(synthetic.c_str(), 4, samples_per_span, &m, nullptr), role);
        } else if (!path.empty()) {
            check(mfat_model_load(path.c_str(), &m), role);
        } else {
            usage_error(std::string(role) + " model required (--model or --synthetic)");
        }
        return Model(m);
    }
};

struct ExtractArgs {
    ModelSource f, g;
    double isovalue = 0.0;
    bool isovalue_set = false;
    double k = 4.0;
    double epsilon = 1e-10;
    double gamma = 2.0;
    int seeds = 0;
    int threads = 1;
    double class_tolerance = 1e-9;
    std::string output, segments, criticals, metrics;
    bool quiet = false;
};

struct Outputs {
    std::string output, segments, criticals, metrics;
};

bool is_power_of_two_divisor(double k) {
    if (k < 2.0 || k != static_cast<double>(static_cast<long long>(k))) return false;
    const long long n = static_cast<long long>(k);
    return (n & (n - 1)) == 0;
}

mfat_options make_options(const ExtractArgs& a, double k, double eps, double gamma) {
    if (!is_power_of_two_divisor(k)) usage_error("step divisor k must be one of 2, 4, 8, 16, ...");
    if (a.threads < 1) usage_error("--threads must be >= 1");
    mfat_options o;
    mfat_options_default(&o);
    o.step_divisor = k;
    o.epsilon = eps;
    o.gamma_factor = gamma;
    o.seeds_per_dim = a.seeds;
    o.threads = a.threads;
    o.class_tolerance = a.class_tolerance;
    return o;
}

std::string metrics_header() { return "e_max,e_avg,n_loop,n_cc,n_vertices,n_edges,wall_time"; }

std::string metrics_row(const mfat_metrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%lld,%lld,%lld,%lld,%.6g", m.e_max, m.e_avg,
                  static_cast<long long>(m.n_loop), static_cast<long long>(m.n_cc),
                  static_cast<long long>(m.n_vertices), static_cast<long long>(m.n_edges), m.wall_time);
    return buf;
}

nlohmann::json metrics_json(const mfat_metrics& m) {
    return {{"e_max", m.e_max},   {"e_avg", m.e_avg},           {"n_loop", m.n_loop},
            {"n_cc", m.n_cc},     {"n_vertices", m.n_vertices}, {"n_edges", m.n_edges},
            {"wall_time", m.wall_time}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw Failure{MFAT_E_IO, "cannot open '" + path + "' for writing"};
    os << text;
    if (!os) throw Failure{MFAT_E_IO, "write failed for '" + path + "'"};
}

void report(const mfat_graph* g, const ExtractArgs& a) {
    mfat_metrics m;
    check(mfat_graph_metrics(g, &m));
    for (std::size_t i = 0; i < mfat_graph_warning_count(g); ++i)
        std::cerr << "warning: " << mfat_graph_warning(g, i) << '\n';
    if (!a.output.empty()) check(mfat_graph_save(g, a.output.c_str()));
    if (!a.segments.empty()) check(mfat_graph_save_segments(g, a.segments.c_str()));
    if (!a.criticals.empty()) check(mfat_graph_save_criticals(g, a.criticals.c_str()));
    nlohmann::json j = metrics_json(m);
    mfat_task task;
    check(mfat_graph_task(g, &task, nullptr));
    if (task == MFAT_RIDGE_VALLEY) {
        nlohmann::json arcs;
        for (int c = MFAT_RIDGE; c <= MFAT_UNCLASSIFIED; ++c) {
            std::size_t n = 0;
            check(mfat_graph_arc_count(g, static_cast<mfat_arc_class>(c), &n));
            arcs[mfat_arc_class_string(static_cast<mfat_arc_class>(c))] = n;
        }
        j["arcs"] = arcs;
    }
    if (!a.metrics.empty()) write_text(a.metrics, j.dump(1) + "\n");
    if (!a.quiet) {
        std::cout << metrics_header() << '\n' << metrics_row(m) << '\n';
        if (j.contains("arcs")) std::cout << "arcs " << j["arcs"].dump() << '\n';
    }
}

void add_model_options(CLI::App* app, ExtractArgs& a, bool two) {
    app->add_option("--model,-m", a.f.path, "Model file for f");
    app->add_option("--synthetic", a.f.synthetic, "Fit f from a named synthetic field instead of a model file");
    if (two) {
        app->add_option("--model2", a.g.path, "Model file for g");
        app->add_option("--synthetic2", a.g.synthetic, "Synthetic field for g");
    }
    app->add_option("--samples-per-span", a.f.samples_per_span, "Samples per span when fitting synthetic fields")
        ->check(CLI::PositiveNumber);
}

void add_trace_options(CLI::App* app, ExtractArgs& a) {
    app->add_option("--step-divisor,-k", a.k, "Step size s = l/k");
    app->add_option("--epsilon", a.epsilon, "Accuracy threshold")->check(CLI::PositiveNumber);
    app->add_option("--gamma", a.gamma, "Connection threshold as a multiple of s");
    app->add_option("--seeds", a.seeds, "Initial points per span per dimension (0: task default)");
    app->add_option("--class-tolerance", a.class_tolerance, "Ridge-valley sign tolerance");
}

void add_output_options(CLI::App* app, ExtractArgs& a) {
    app->add_option("--threads,-j", a.threads, "Worker threads");
    app->add_option("--output,-o", a.output, "Graph file (JSON)");
    app->add_option("--segments", a.segments, "Edge list CSV for plotting");
    app->add_option("--criticals", a.criticals, "Inserted critical points CSV");
    app->add_option("--metrics", a.metrics, "Metrics file (JSON)");
    app->add_flag("--quiet,-q", a.quiet, "Do not print the metrics row");
}

Graph run_extract(mfat_task task, const ExtractArgs& a, const mfat_model* f, const mfat_model* g,
                  const mfat_options& o) {
    mfat_graph* out = nullptr;
    switch (task) {
        case MFAT_CONTOUR: check(mfat_extract_contour(f, a.isovalue, &o, &out)); break;
        case MFAT_JACOBI: check(mfat_extract_jacobi(f, g, &o, &out)); break;
        case MFAT_RIDGE_VALLEY: check(mfat_extract_ridge_valley(f, &o, &out)); break;
    }
    return Graph(out);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            usage_error("bad list entry '" + item + "'");
        }
    }
    if (out.empty()) usage_error("empty parameter list");
    return out;
}

std::pair<int, int> parse_pair(const std::string& s, const char* what) {
    int a = 0, b = 0;
    char x = 0, extra = 0;
    if (std::sscanf(s.c_str(), "%d%c%d%c", &a, &x, &b, &extra) != 3 || (x != 'x' && x != 'X'))
        usage_error(std::string(what) + " must look like NxM");
    return {a, b};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological descriptors from continuous B-spline models"};
    app.set_config("--config", "", "TOML file supplying any option; the command line wins");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mfat_version()));

    // fit
    std::string fit_input, fit_output, fit_spans, fit_ctrl;
    int fit_degree = 4;
    auto* fit = app.add_subcommand("fit", "Least-squares fit of a gridded CSV");
    fit->add_option("--input,-i", fit_input, "Grid CSV")->required();
    fit->add_option("--degree,-p", fit_degree, "Polynomial degree");
    fit->add_option("--spans", fit_spans, "Spans per dimension, e.g. 27x27");
    fit->add_option("--ctrl", fit_ctrl, "Control points per dimension, e.g. 31x31");
    fit->add_option("--output,-o", fit_output, "Model file")->required();

    // synth
    std::string synth_field, synth_output, synth_model;
    int synth_nx = 0, synth_ny = 0, synth_sps = 8;
    auto* synth = app.add_subcommand("synth", "Sample a synthetic field onto a grid");
    synth->add_option("--field", synth_field, "schwefel | sinc | gaussian_pair_f | gaussian_pair_g | gaussian_mixture")
        ->required();
    synth->add_option("--nx", synth_nx, "Samples along x1 (default: samples-per-span * spans + 1)");
    synth->add_option("--ny", synth_ny, "Samples along x2");
    synth->add_option("--samples-per-span", synth_sps, "Default sampling density")->check(CLI::PositiveNumber);
    synth->add_option("--output,-o", synth_output, "Grid CSV");
    synth->add_option("--model", synth_model, "Also write the fitted reference model");

    // contour / jacobi / ridge-valley
    ExtractArgs ca, ja, ra;
    auto* contour = app.add_subcommand("contour", "Isocontour of f");
    add_model_options(contour, ca, false);
    contour->add_option("--isovalue,-a", ca.isovalue, "Isovalue")->required();
    add_trace_options(contour, ca);
    add_output_options(contour, ca);

    auto* jacobi = app.add_subcommand("jacobi", "Jacobi set of f and g");
    add_model_options(jacobi, ja, true);
    add_trace_options(jacobi, ja);
    add_output_options(jacobi, ja);

    auto* ridge = app.add_subcommand("ridge-valley", "Ridge-valley graph of f");
    add_model_options(ridge, ra, false);
    add_trace_options(ridge, ra);
    add_output_options(ridge, ra);

    // baseline
    ExtractArgs ba;
    std::string base_task = "contour";
    int base_ratio = 4;
    auto* base = app.add_subcommand("baseline", "Marching squares on the sampled model");
    base->add_option("--task,-t", base_task, "contour | jacobi | ridge-valley");
    add_model_options(base, ba, true);
    base->add_option("--isovalue,-a", ba.isovalue, "Isovalue (contour)");
    base->add_option("--ratio,-r", base_ratio, "Samples per span per dimension")->check(CLI::PositiveNumber);
    add_output_options(base, ba);

    // sweep
    ExtractArgs sa;
    std::string sweep_task = "contour", sweep_k, sweep_eps, sweep_gamma, sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Metrics table over k, epsilon or gamma");
    sweep->add_option("--task,-t", sweep_task, "contour | jacobi | ridge-valley");
    add_model_options(sweep, sa, true);
    sweep->add_option("--isovalue,-a", sa.isovalue, "Isovalue (contour)");
    add_trace_options(sweep, sa);
    sweep->add_option("--threads,-j", sa.threads, "Worker threads");
    auto* ok = sweep->add_option("--k-list", sweep_k, "Comma-separated step divisors");
    auto* oe = sweep->add_option("--epsilon-list", sweep_eps, "Comma-separated epsilons");
    auto* og = sweep->add_option("--gamma-list", sweep_gamma, "Comma-separated gamma multipliers");
    ok->excludes(oe)->excludes(og);
    oe->excludes(og);
    sweep->add_option("--output,-o", sweep_out, "CSV table (default: stdout)");

    // metrics
    ExtractArgs ma;
    std::string metrics_graph;
    auto* metrics = app.add_subcommand("metrics", "Metrics of a saved graph");
    metrics->add_option("--graph,-g", metrics_graph, "Graph file")->required();
    add_model_options(metrics, ma, true);
    metrics->add_option("--metrics", ma.metrics, "Metrics file (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) {
            if (fit_degree < 1) usage_error("--degree must be >= 1");
            if (fit_spans.empty() == fit_ctrl.empty()) usage_error("give exactly one of --spans and --ctrl");
            auto [n1, n2] = fit_spans.empty() ? parse_pair(fit_ctrl, "--ctrl") : parse_pair(fit_spans, "--spans");
            if (!fit_spans.empty()) {
                if (n1 < 1 || n2 < 1) usage_error("--spans must be positive");
                n1 += fit_degree;
                n2 += fit_degree;
            }
            mfat_grid* gr = nullptr;
            check(mfat_grid_load(fit_input.c_str(), &gr), fit_input);
            Grid grid(gr);
            mfat_model* m = nullptr;
            mfat_fit_report rep;
            check(mfat_model_fit(grid.get(), fit_degree, n1, n2, &m, &rep));
            Model model(m);
            check(mfat_model_save(model.get(), fit_output.c_str()));
            std::printf("rms_residual=%.6g max_residual=%.6g\n", rep.rms_residual, rep.max_residual);
            if (rep.regularized)
                std::fprintf(stderr, "warning: normal system was singular (condition estimate %.3g); ridge added\n",
                             rep.condition_estimate);
            return 0;
        }
        if (synth->parsed()) {
            if (synth_output.empty() && synth_model.empty()) usage_error("give --output and/or --model");
            int su = 0, sv = 0;
            check(mfat_synthetic_spans(synth_field.c_str(), &su, &sv));
            const int nx = synth_nx > 0 ? synth_nx : synth_sps * su + 1;
            const int ny = synth_ny > 0 ? synth_ny : synth_sps * sv + 1;
            if (!synth_output.empty()) {
                mfat_grid* gr = nullptr;
                check(mfat_grid_synthetic(synth_field.c_str(), nx, ny, &gr));
                Grid grid(gr);
                check(mfat_grid_save(grid.get(), synth_output.c_str()));
            }
            if (!synth_model.empty()) {
                mfat_model* m = nullptr;
                mfat_fit_report rep;
                check(mfat_model_fit_synthetic(synth_field.c_str(), 4, synth_sps, &m, &rep));
                Model model(m);
                check(mfat_model_save(model.get(), synth_model.c_str()));
                std::printf("rms_residual=%.6g max_residual=%.6g\n", rep.rms_residual, rep.max_residual);
            }
            return 0;
        }
        auto extract = [&](mfat_task task, const ExtractArgs& a) {
            const Model f = a.f.load("f");
            Model g;
            if (task == MFAT_JACOBI) {
                ModelSource gs = a.g;
                gs.samples_per_span = a.f.samples_per_span;
                g = gs.load("g");
            }
            const mfat_options o = make_options(a, a.k, a.epsilon, a.gamma);
            Graph out = run_extract(task, a, f.get(), g.get(), o);
            report(out.get(), a);
        };
        if (contour->parsed()) extract(MFAT_CONTOUR, ca);
        if (jacobi->parsed()) extract(MFAT_JACOBI, ja);
        if (ridge->parsed()) extract(MFAT_RIDGE_VALLEY, ra);
        if (base->parsed()) {
            mfat_task task;
            check(mfat_task_from_string(base_task.c_str(), &task));
            if (ba.threads < 1) usage_error("--threads must be >= 1");
            const Model f = ba.f.load("f");
            Model g;
            if (task == MFAT_JACOBI) {
                ModelSource gs = ba.g;
                gs.samples_per_span = ba.f.samples_per_span;
                g = gs.load("g");
            }
            mfat_graph* out = nullptr;
            check(mfat_baseline(task, f.get(), g.get(), ba.isovalue, base_ratio, ba.threads, &out));
            Graph graph(out);
            report(graph.get(), ba);
        }
        if (sweep->parsed()) {
            mfat_task task;
            check(mfat_task_from_string(sweep_task.c_str(), &task));
            std::string param;
            std::vector<double> values;
            if (!sweep_k.empty()) param = "k", values = parse_list(sweep_k);
            else if (!sweep_eps.empty()) param = "epsilon", values = parse_list(sweep_eps);
            else if (!sweep_gamma.empty()) param = "gamma", values = parse_list(sweep_gamma);
            else usage_error("give one of --k-list, --epsilon-list, --gamma-list");
            const Model f = sa.f.load("f");
            Model g;
            if (task == MFAT_JACOBI) {
                ModelSource gs = sa.g;
                gs.samples_per_span = sa.f.samples_per_span;
                g = gs.load("g");
            }
            std::ostringstream table;
            table << param << ',' << metrics_header() << '\n';
            for (double v : values) {
                const mfat_options o = make_options(sa, param == "k" ? v : sa.k, param == "epsilon" ? v : sa.epsilon,
                                                    param == "gamma" ? v : sa.gamma);
                Graph out = run_extract(task, sa, f.get(), g.get(), o);
                mfat_metrics m;
                check(mfat_graph_metrics(out.get(), &m));
                table << v << ',' << metrics_row(m) << '\n';
            }
            if (sweep_out.empty()) std::cout << table.str();
            else write_text(sweep_out, table.str());
        }
        if (metrics->parsed()) {
            mfat_graph* gr = nullptr;
            check(mfat_graph_load(metrics_graph.c_str(), &gr));
            Graph graph(gr);
            mfat_metrics m;
            if (ma.f.given()) {
                mfat_task task;
                check(mfat_graph_task(graph.get(), &task, nullptr));
                const Model f = ma.f.load("f");
                Model g;
                if (task == MFAT_JACOBI) g = ma.g.load("g");
                check(mfat_graph_measure(graph.get(), f.get(), g.get(), &m));
            } else {
                check(mfat_graph_metrics(graph.get(), &m));
            }
            const std::string text = metrics_json(m).dump(1) + "\n";
            if (!ma.metrics.empty()) write_text(ma.metrics, text);
            std::cout << text;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return mfat_exit_code(f.status);
    }
    return 0;
}
