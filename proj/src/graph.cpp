#include "mfatopo/graph.hpp"

#include <cmath>
#include <numeric>

namespace mfatopo {

const char* to_string(VertexKind kind) {
    switch (kind) {
        case VertexKind::Regular: return "regular";
        case VertexKind::Minimum: return "minimum";
        case VertexKind::Maximum: return "maximum";
        case VertexKind::Saddle: return "saddle";
        case VertexKind::Degenerate: return "degenerate";
    }
    return "regular";
}

const char* to_string(ArcClass label) {
    switch (label) {
        case ArcClass::Ridge: return "ridge";
        case ArcClass::Valley: return "valley";
        case ArcClass::PseudoRidge: return "pseudo-ridge";
        case ArcClass::PseudoValley: return "pseudo-valley";
        case ArcClass::Unclassified: return "unclassified";
    }
    return "unclassified";
}

VertexKind vertex_kind_from_string(const std::string& s) {
    for (auto k : {VertexKind::Regular, VertexKind::Minimum, VertexKind::Maximum, VertexKind::Saddle,
                   VertexKind::Degenerate})
        if (s == to_string(k)) return k;
    throw Error(ErrorKind::Parse, "unknown vertex kind '" + s + "'");
}

ArcClass arc_class_from_string(const std::string& s) {
    for (auto k : {ArcClass::Ridge, ArcClass::Valley, ArcClass::PseudoRidge, ArcClass::PseudoValley,
                   ArcClass::Unclassified})
        if (s == to_string(k)) return k;
    throw Error(ErrorKind::Parse, "unknown arc class '" + s + "'");
}

VertexKind to_vertex_kind(CriticalKind kind) {
    switch (kind) {
        case CriticalKind::Minimum: return VertexKind::Minimum;
        case CriticalKind::Maximum: return VertexKind::Maximum;
        case CriticalKind::Saddle: return VertexKind::Saddle;
        case CriticalKind::Degenerate: return VertexKind::Degenerate;
    }
    return VertexKind::Degenerate;
}

std::uint64_t TopoGraph::key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

int TopoGraph::add_vertex(const GraphVertex& v) {
    vertices_.push_back(v);
    return static_cast<int>(vertices_.size()) - 1;
}

bool TopoGraph::add_edge(int a, int b) {
    if (a == b) return false;
    if (a < 0 || b < 0 || a >= static_cast<int>(vertices_.size()) || b >= static_cast<int>(vertices_.size()))
        throw Error(ErrorKind::Validation, "edge references a missing vertex");
    if (!edge_keys_.insert(key(a, b)).second) return false;
    edges_.emplace_back(a, b);
    return true;
}

bool TopoGraph::has_edge(int a, int b) const { return edge_keys_.count(key(a, b)) != 0; }

std::vector<int> TopoGraph::degrees() const {
    std::vector<int> deg(vertices_.size(), 0);
    for (auto [a, b] : edges_) {
        ++deg[a];
        ++deg[b];
    }
    return deg;
}

void TopoGraph::validate() const {
    std::unordered_set<std::uint64_t> seen;
    for (auto [a, b] : edges_) {
        if (a == b) throw Error(ErrorKind::Validation, "self-edge");
        if (a < 0 || b < 0 || a >= static_cast<int>(vertices_.size()) || b >= static_cast<int>(vertices_.size()))
            throw Error(ErrorKind::Validation, "edge index out of range");
        if (!seen.insert(key(a, b)).second) throw Error(ErrorKind::Validation, "duplicate edge");
    }
    if (!labels.empty() && labels.size() != vertices_.size())
        throw Error(ErrorKind::Validation, "label count does not match vertex count");
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

}  // namespace

std::size_t components(const TopoGraph& g) {
    UnionFind uf(g.num_vertices());
    std::size_t cc = g.num_vertices();
    for (auto [a, b] : g.edges())
        if (uf.unite(a, b)) --cc;
    return cc;
}

std::int64_t loops(const TopoGraph& g) {
    return static_cast<std::int64_t>(g.num_edges()) - static_cast<std::int64_t>(g.num_vertices()) +
           static_cast<std::int64_t>(components(g));
}

Residuals residuals(const TopoGraph& g, const ScalarField& field, double a) {
    Residuals r;
    if (g.num_vertices() == 0) return r;
    double sum = 0.0;
    for (const auto& v : g.vertices()) {
        const double e = std::abs(field.value(v.position) - a);
        r.e_max = std::max(r.e_max, e);
        sum += e;
    }
    r.e_avg = sum / static_cast<double>(g.num_vertices());
    return r;
}

Residuals stored_residuals(const TopoGraph& g, double a) {
    Residuals r;
    if (g.num_vertices() == 0) return r;
    double sum = 0.0;
    for (const auto& v : g.vertices()) {
        const double e = std::abs(v.value - a);
        r.e_max = std::max(r.e_max, e);
        sum += e;
    }
    r.e_avg = sum / static_cast<double>(g.num_vertices());
    return r;
}

MetricsReport measure(const TopoGraph& g, const Residuals& r, double wall_time) {
    MetricsReport m;
    m.e_max = r.e_max;
    m.e_avg = r.e_avg;
    m.n_cc = static_cast<std::int64_t>(components(g));
    m.n_vertices = static_cast<std::int64_t>(g.num_vertices());
    m.n_edges = static_cast<std::int64_t>(g.num_edges());
    m.n_loop = m.n_edges - m.n_vertices + m.n_cc;
    m.wall_time = wall_time;
    return m;
}

}  // namespace mfatopo
