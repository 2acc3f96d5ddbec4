#include "mfatopo/model.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace mfatopo {

using nlohmann::json;

void write_model(const MfaModel& model, std::ostream& os) {
    json j;
    j["format"] = "mfatopo-model";
    j["version"] = 1;
    j["degree"] = model.degree();
    j["knots_u"] = model.knots_u().knots();
    j["knots_v"] = model.knots_v().knots();
    j["ctrl_rows"] = model.ctrl_rows();
    j["ctrl_cols"] = model.ctrl_cols();
    j["ctrl"] = model.ctrl_values();
    const Box& d = model.domain();
    j["domain"] = {d.lo[0], d.hi[0], d.lo[1], d.hi[1]};
    // nlohmann emits the shortest representation that round-trips exactly
    os << j.dump(1) << '\n';
}

void save_model(const MfaModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    write_model(model, os);
    if (!os) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

namespace {

template <typename T>
T field(const json& j, const char* name, const std::string& source) {
    if (!j.contains(name)) throw Error(ErrorKind::Parse, source + ": missing field '" + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, source + ": field '" + name + "': " + e.what());
    }
}

}  // namespace

MfaModel read_model(std::istream& is, const std::string& source) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, source + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::Parse, source + ": top level must be an object");
    const int degree = field<int>(j, "degree", source);
    auto ku = field<std::vector<double>>(j, "knots_u", source);
    auto kv = field<std::vector<double>>(j, "knots_v", source);
    const int rows = field<int>(j, "ctrl_rows", source);
    const int cols = field<int>(j, "ctrl_cols", source);
    auto ctrl = field<std::vector<double>>(j, "ctrl", source);
    auto dom = field<std::vector<double>>(j, "domain", source);
    if (dom.size() != 4) throw Error(ErrorKind::Parse, source + ": field 'domain' must hold 4 numbers");
    if (rows < 1 || cols < 1 || ctrl.size() != static_cast<std::size_t>(rows) * cols) {
        std::ostringstream os;
        os << source << ": field 'ctrl' has " << ctrl.size() << " values, expected ctrl_rows*ctrl_cols = " << rows
           << "*" << cols;
        throw Error(ErrorKind::Parse, os.str());
    }
    if (static_cast<int>(ku.size()) != rows + degree + 1 || static_cast<int>(kv.size()) != cols + degree + 1)
        throw Error(ErrorKind::Parse, source + ": knot vector lengths do not match ctrl dimensions and degree");
    Box box{{dom[0], dom[2]}, {dom[1], dom[3]}};
    try {
        return MfaModel(KnotVector(degree, std::move(ku)), KnotVector(degree, std::move(kv)), std::move(ctrl), box);
    } catch (const Error& e) {
        throw Error(e.kind(), source + ": " + e.what());
    }
}

MfaModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::Io, "cannot open model file '" + path + "'");
    return read_model(is, path);
}

GridData load_grid(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::Io, "cannot open grid file '" + path + "'");
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(tok);
        return out;
    };
    auto num = [&](const std::string& tok, int line_no) {
        try {
            std::size_t pos = 0;
            double v = std::stod(tok, &pos);
            while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
        }
    };

    GridData g;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos && line[0] != '#') break;
    }
    auto header = split(line);
    if (header.size() != 2 && header.size() != 6)
        throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) +
                                          ": header must be 'nx,ny' or 'nx,ny,x1min,x1max,x2min,x2max'");
    g.nx = static_cast<int>(num(header[0], line_no));
    g.ny = static_cast<int>(num(header[1], line_no));
    if (header.size() == 6)
        g.domain = Box{{num(header[2], line_no), num(header[4], line_no)}, {num(header[3], line_no), num(header[5], line_no)}};
    if (g.nx < 2 || g.ny < 2) throw Error(ErrorKind::Parse, path + ": nx and ny must be >= 2");
    g.values.reserve(static_cast<std::size_t>(g.nx) * g.ny);
    int rows = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto toks = split(line);
        if (static_cast<int>(toks.size()) != g.ny)
            throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(g.ny) +
                                              " values, found " + std::to_string(toks.size()));
        for (const auto& t : toks) g.values.push_back(num(t, line_no));
        ++rows;
    }
    if (rows != g.nx)
        throw Error(ErrorKind::Parse, path + ": expected " + std::to_string(g.nx) + " rows, found " + std::to_string(rows));
    try {
        g.validate();
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
    return g;
}

void save_grid(const GridData& grid, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    os.precision(17);
    os << grid.nx << ',' << grid.ny << ',' << grid.domain.lo[0] << ',' << grid.domain.hi[0] << ','
       << grid.domain.lo[1] << ',' << grid.domain.hi[1] << '\n';
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) os << (j ? "," : "") << grid.at(i, j);
        os << '\n';
    }
    if (!os) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace mfatopo
