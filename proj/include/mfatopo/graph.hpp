#pragma once

#include "mfatopo/critical_points.hpp"
#include "mfatopo/field.hpp"

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mfatopo {

enum class VertexKind { Regular, Minimum, Maximum, Saddle, Degenerate };
enum class ArcClass { Ridge, Valley, PseudoRidge, PseudoValley, Unclassified };

const char* to_string(VertexKind kind);
const char* to_string(ArcClass label);
VertexKind vertex_kind_from_string(const std::string& s);
ArcClass arc_class_from_string(const std::string& s);
VertexKind to_vertex_kind(CriticalKind kind);

struct GraphVertex {
    Vec2 position = Vec2::Zero();
    double value = 0.0;  // traced field value (f, h or h-tilde)
    VertexKind kind = VertexKind::Regular;
};

// Undirected graph of extracted curve points. Edges never repeat and never
// join a vertex to itself.
class TopoGraph {
public:
    std::string task = "contour";  // contour | jacobi | ridge-valley
    double isovalue = 0.0;

    int add_vertex(const GraphVertex& v);
    // Returns false (and adds nothing) for self-edges and duplicates.
    bool add_edge(int a, int b);
    bool has_edge(int a, int b) const;

    const std::vector<GraphVertex>& vertices() const { return vertices_; }
    std::vector<GraphVertex>& vertices() { return vertices_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    std::vector<int> degrees() const;

    // Optional per-vertex arc classification (ridge-valley graphs).
    std::vector<ArcClass> labels;

    void validate() const;

private:
    static std::uint64_t key(int a, int b);

    std::vector<GraphVertex> vertices_;
    std::vector<std::pair<int, int>> edges_;
    std::unordered_set<std::uint64_t> edge_keys_;
};

// Number of connected components (union-find). Isolated vertices count.
std::size_t components(const TopoGraph& g);
// Cycle rank E - V + CC.
std::int64_t loops(const TopoGraph& g);

struct Residuals {
    double e_max = 0.0;
    double e_avg = 0.0;
};

// |field(v) - a| over all vertices, re-evaluating the field.
Residuals residuals(const TopoGraph& g, const ScalarField& field, double a);
// Same, from the values stored in the graph.
Residuals stored_residuals(const TopoGraph& g, double a);

struct MetricsReport {
    double e_max = 0.0;
    double e_avg = 0.0;
    std::int64_t n_loop = 0;
    std::int64_t n_cc = 0;
    std::int64_t n_vertices = 0;
    std::int64_t n_edges = 0;
    double wall_time = 0.0;  // seconds, extraction phase only
};

MetricsReport measure(const TopoGraph& g, const Residuals& r, double wall_time = 0.0);

}  // namespace mfatopo
