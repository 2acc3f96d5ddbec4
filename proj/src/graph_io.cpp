#include "mfatopo/graph_io.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace mfatopo {

using nlohmann::json;

void write_graph(const TopoGraph& g, std::ostream& os) {
    json j;
    j["format"] = "mfatopo-graph";
    j["version"] = 1;
    j["task"] = g.task;
    j["isovalue"] = g.isovalue;
    const bool labelled = g.labels.size() == g.num_vertices() && !g.labels.empty();
    json nodes = json::array();
    std::map<std::string, std::size_t> counts;
    for (std::size_t k = 0; k < g.num_vertices(); ++k) {
        const auto& v = g.vertices()[k];
        json n = {{"id", k}, {"x1", v.position[0]}, {"x2", v.position[1]}, {"value", v.value},
                  {"kind", to_string(v.kind)}};
        if (labelled) {
            n["label"] = to_string(g.labels[k]);
            ++counts[to_string(g.labels[k])];
        }
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    j["arc_labels"] = counts;
    os << j.dump() << '\n';
}

void save_graph(const TopoGraph& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    write_graph(g, os);
    if (!os) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

TopoGraph read_graph(std::istream& is, const std::string& source) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, source + ": " + e.what());
    }
    TopoGraph g;
    try {
        g.task = j.value("task", std::string("contour"));
        g.isovalue = j.value("isovalue", 0.0);
        bool labelled = false;
        for (const auto& n : j.at("nodes")) {
            GraphVertex v;
            v.position = {n.at("x1").get<double>(), n.at("x2").get<double>()};
            v.value = n.at("value").get<double>();
            v.kind = vertex_kind_from_string(n.at("kind").get<std::string>());
            const int id = g.add_vertex(v);
            if (n.at("id").get<int>() != id) throw Error(ErrorKind::Validation, source + ": node ids must be 0..n-1 in order");
            if (n.contains("label")) {
                labelled = true;
                g.labels.resize(static_cast<std::size_t>(id) + 1, ArcClass::Unclassified);
                g.labels[id] = arc_class_from_string(n.at("label").get<std::string>());
            }
        }
        if (labelled) g.labels.resize(g.num_vertices(), ArcClass::Unclassified);
        for (const auto& e : j.at("edges")) {
            const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
            if (a < 0 || b < 0 || a >= static_cast<int>(g.num_vertices()) || b >= static_cast<int>(g.num_vertices()))
                throw Error(ErrorKind::Validation, source + ": edge index out of range");
            g.add_edge(a, b);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, source + ": " + e.what());
    }
    return g;
}

TopoGraph load_graph(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    return read_graph(is, path);
}

void save_segments_csv(const TopoGraph& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    os.precision(17);
    os << "x1a,x2a,x1b,x2b,label\n";
    const bool labelled = g.labels.size() == g.num_vertices();
    for (const auto& [a, b] : g.edges()) {
        const Vec2& p = g.vertices()[a].position;
        const Vec2& q = g.vertices()[b].position;
        std::string label = "";
        if (labelled) {
            // an edge takes a classified endpoint's label
            ArcClass l = g.labels[a] != ArcClass::Unclassified ? g.labels[a] : g.labels[b];
            label = to_string(l);
        }
        os << p[0] << ',' << p[1] << ',' << q[0] << ',' << q[1] << ',' << label << '\n';
    }
    if (!os) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

void write_metrics_json(const MetricsReport& m, std::ostream& os) {
    json j = {{"e_max", m.e_max},       {"e_avg", m.e_avg},     {"n_loop", m.n_loop},
              {"n_cc", m.n_cc},         {"n_vertices", m.n_vertices}, {"n_edges", m.n_edges},
              {"wall_time", m.wall_time}};
    os << j.dump(1) << '\n';
}

std::string metrics_csv_header() { return "e_max,e_avg,n_loop,n_cc,n_vertices,n_edges,wall_time"; }

std::string metrics_csv_row(const MetricsReport& m) {
    std::ostringstream os;
    os.precision(6);
    os << m.e_max << ',' << m.e_avg << ',' << m.n_loop << ',' << m.n_cc << ',' << m.n_vertices << ',' << m.n_edges
       << ',' << m.wall_time;
    return os.str();
}

}  // namespace mfatopo
