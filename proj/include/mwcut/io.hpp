#ifndef MWCUT_IO_HPP
#define MWCUT_IO_HPP

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwcut/dynamics.hpp"
#include "mwcut/errors.hpp"
#include "mwcut/graph.hpp"
#include "mwcut/solver.hpp"

namespace mwcut {

namespace detail {
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Graph text format: header "N k", one line of k 1-based terminal ids, then
// one "u v w" edge per line (1-based vertex labels).
// ---------------------------------------------------------------------------

inline Graph parse_graph_text(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_line = [&](std::string& out) {
        while (std::getline(in, line)) {
            ++lineno;
            std::size_t i = line.find_first_not_of(" \t\r");
            if (i == std::string::npos) continue;  // blank
            if (line[i] == '#') continue;          // comment
            out = line;
            return true;
        }
        return false;
    };

    std::string header;
    if (!next_line(header)) throw ParseError("empty graph file");
    int n = 0, k = 0;
    {
        std::istringstream ss(header);
        if (!(ss >> n >> k) || n <= 0 || k <= 0)
            throw ParseError("expected header 'N k'", lineno);
    }
    std::string terms;
    if (!next_line(terms)) throw ParseError("missing terminal line", lineno);
    std::vector<int> terminals;
    {
        std::istringstream ss(terms);
        int t = 0;
        while (ss >> t) {
            if (t < 1 || t > n) throw ParseError("terminal id out of range", lineno);
            terminals.push_back(t - 1);
        }
        if (static_cast<int>(terminals.size()) != k)
            throw ParseError("expected " + std::to_string(k) + " terminals", lineno);
    }
    std::vector<Edge> edges;
    std::string eline;
    while (next_line(eline)) {
        std::istringstream ss(eline);
        int u = 0, v = 0;
        double w = 0.0;
        if (!(ss >> u >> v >> w)) throw ParseError("expected 'u v w'", lineno);
        if (u < 1 || u > n || v < 1 || v > n)
            throw ParseError("edge endpoint out of range", lineno);
        if (!(w >= 0.0)) throw ParseError("negative edge weight", lineno);
        edges.push_back({u - 1, v - 1, w});
    }
    try {
        return Graph(n, std::move(edges), std::move(terminals));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

inline void write_graph_text(std::ostream& out, const Graph& g) {
    out << g.n() << " " << g.k() << "\n";
    for (int j = 0; j < g.k(); ++j)
        out << (g.terminals()[j] + 1) << (j + 1 < g.k() ? ' ' : '\n');
    for (const Edge& e : g.edges())
        out << (e.from + 1) << " " << (e.to + 1) << " " << detail::fmt(e.weight) << "\n";
}

// JSON equivalent: {"n": N, "terminals": [1-based], "edges": [[u, v, w], ...]}.
inline Graph parse_graph_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    try {
        const int n = j.at("n").get<int>();
        std::vector<int> terminals;
        for (int t : j.at("terminals")) terminals.push_back(t - 1);
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (e.size() != 3) throw ParseError("edges must be [u, v, w] triples");
            edges.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1, e[2].get<double>()});
        }
        return Graph(n, std::move(edges), std::move(terminals));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad graph JSON: ") + e.what());
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

inline Graph load_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return parse_graph_json(f);
    return parse_graph_text(f);
}

// ---------------------------------------------------------------------------
// Solver outputs
// ---------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
    const int k = trace.entries.empty()
                      ? 0
                      : static_cast<int>(trace.entries.front().partition_weights.size());
    out << "beta,L,D,H,inner_iters";
    for (int j = 1; j <= k; ++j) out << ",pA_" << j;
    out << "\n";
    for (const TraceEntry& e : trace.entries) {
        out << detail::fmt(e.beta) << "," << detail::fmt(e.free_energy) << ","
            << detail::fmt(e.cut_cost) << "," << detail::fmt(e.entropy) << ","
            << e.inner_iters;
        for (double v : e.partition_weights) out << "," << detail::fmt(v);
        out << "\n";
    }
}

inline nlohmann::json partition_to_json(const Partition& p,
                                        const std::map<int, std::vector<int>>& ties) {
    nlohmann::json j;
    j["assignment"] = p.assignment;
    j["cut_value"] = p.cut_value;
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [v, labels] : ties) t[std::to_string(v)] = labels;
    j["ties"] = t;
    return j;
}

inline nlohmann::json associations_to_json(const AssociationMatrix& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < p.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < p.cols(); ++j) row.push_back(p(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Dynamic systems
// ---------------------------------------------------------------------------

// {"n", "terminals", "edges": [[u, v], ...], "A_diag", "B_diag", "W0",
//  "mu", "C0", "beta_track", "h", "T", optional "U0" (number or array)}
inline DynamicSystem parse_dynamic_system(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    DynamicSystem sys;
    try {
        sys.n = j.at("n").get<int>();
        for (int t : j.at("terminals")) sys.terminals.push_back(t - 1);
        for (const auto& e : j.at("edges")) {
            if (e.size() != 2) throw ParseError("edges must be [u, v] pairs");
            sys.edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
        }
        sys.a_diag = j.at("A_diag").get<std::vector<double>>();
        sys.b_diag = j.at("B_diag").get<std::vector<double>>();
        sys.w0 = j.at("W0").get<std::vector<double>>();
        sys.mu = j.at("mu").get<double>();
        sys.c0 = j.at("C0").get<double>();
        sys.beta_track = j.at("beta_track").get<double>();
        sys.step = j.at("h").get<double>();
        sys.horizon = j.at("T").get<double>();
        if (j.contains("U0")) {
            if (j["U0"].is_number())
                sys.u0 = j["U0"].get<double>();
            else
                sys.u0_vec = j["U0"].get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad system JSON: ") + e.what());
    }
    try {
        sys.validate();
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    return sys;
}

inline DynamicSystem load_dynamic_system(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    return parse_dynamic_system(f);
}

inline void write_sim_csv(std::ostream& out, const SimTrace& trace, int m) {
    out << "t";
    for (int e = 1; e <= m; ++e) out << ",w_" << e;
    for (int e = 1; e <= m; ++e) out << ",u_" << e;
    out << ",F,Fdot,normU2,assignment\n";
    for (const SimStep& s : trace.steps) {
        out << detail::fmt(s.t);
        for (double v : s.w) out << "," << detail::fmt(v);
        for (double v : s.u) out << "," << detail::fmt(v);
        out << "," << detail::fmt(s.energy) << "," << detail::fmt(s.energy_rate) << ","
            << detail::fmt(s.control_norm2) << ",";
        for (std::size_t i = 0; i < s.assignment.size(); ++i)
            out << s.assignment[i] << (i + 1 < s.assignment.size() ? ";" : "");
        out << "\n";
    }
}

}  // namespace mwcut

#endif  // MWCUT_IO_HPP
