#pragma once

#include "mfatopo/graph.hpp"

#include <iosfwd>
#include <string>

namespace mfatopo {

// JSON document {format, task, isovalue, nodes:[{id,x1,x2,value,kind[,label]}], edges:[[i,j]], arc_labels}.
void write_graph(const TopoGraph& g, std::ostream& os);
void save_graph(const TopoGraph& g, const std::string& path);
TopoGraph read_graph(std::istream& is, const std::string& source = "<stream>");
TopoGraph load_graph(const std::string& path);

// One line per edge: x1a,x2a,x1b,x2b,label.
void save_segments_csv(const TopoGraph& g, const std::string& path);

void write_metrics_json(const MetricsReport& m, std::ostream& os);
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& m);

}  // namespace mfatopo
