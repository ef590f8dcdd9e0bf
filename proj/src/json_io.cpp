#include "conecalc/json_io.hpp"

#include <fstream>
#include <sstream>

#include "conecalc/error.hpp"

namespace conecalc {

json to_json(const SpectrumTable& table) {
    json entries = json::array();
    for (const auto& e : table.entries)
        entries.push_back({{"lambda", e.lambda}, {"mult", e.mult}});
    return json{{"link_dim", table.link_dim},
                {"coverage_max", table.coverage_max},
                {"entries", entries},
                {"source", to_string(table.source)},
                {"cluster_tol", table.cluster_tol}};
}

SpectrumTable spectrum_from_json(const json& j) {
    SpectrumTable table;
    table.link_dim = j.at("link_dim").get<int>();
    table.coverage_max = j.at("coverage_max").get<double>();
    table.source = spectrum_source_from_string(j.at("source").get<std::string>());
    table.cluster_tol = j.value("cluster_tol", 1e-9);
    for (const auto& e : j.at("entries"))
        table.entries.push_back({e.at("lambda").get<double>(), e.at("mult").get<int>()});
    table.validate();
    return table;
}

SpectrumTable read_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open spectrum file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("bad spectrum JSON: ") + e.what());
    }
    // Accept both bare tables and whole run reports from `spectrum -o`.
    if (j.contains("command") && j.contains("results")) j = j["results"];
    return spectrum_from_json(j);
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

json to_json(const LatticeBasis& lattice) {
    return json{{"dim", lattice.dim}, {"basis", lattice.basis}, {"gram", lattice.gram()}};
}

LatticeBasis lattice_from_json(const json& j) {
    LatticeBasis lattice;
    lattice.dim = j.at("dim").get<int>();
    lattice.basis = j.at("basis").get<std::vector<double>>();
    lattice.validate();
    return lattice;
}

json to_json(const IndicialRoot& root) {
    return json{{"alpha", root.alpha},
                {"eigenvalue", root.eigenvalue},
                {"multiplicity", root.multiplicity},
                {"branch", root.branch == RootBranch::Plus ? "plus" : "minus"}};
}

json to_json(const ExceptionalSet& set) {
    json roots = json::array();
    for (const auto& r : set.roots) roots.push_back(to_json(r));
    return json{{"m", set.m},
                {"roots", roots},
                {"range", {set.range_lo, set.range_hi}},
                {"spectrum_coverage_max", set.spectrum_coverage_max}};
}

json to_json(const IndexReport& report) {
    json j{{"fredholm", report.fredholm},
           {"per_cone_counts", report.per_cone_counts}};
    if (report.index) j["index"] = *report.index;
    if (report.wall) j["wall"] = {{"cone", report.wall->first}, {"alpha", report.wall->second}};
    json windows = json::array();
    for (const auto& [lo, hi] : report.windows) windows.push_back({lo, hi});
    j["windows"] = windows;
    return j;
}

json to_json(const RigidityReport& report) {
    return json{{"m", report.m},
                {"mult_at_2m", report.mult_at_2m},
                {"expected", report.expected},
                {"dim_g", report.dim_g},
                {"rigid", report.rigid},
                {"deficiency", report.deficiency}};
}

json to_json(const RadialSolution& sol) {
    json samples = json::array();
    for (std::size_t i = 0; i < sol.log_nodes.size(); ++i)
        samples.push_back({sol.radius(i), sol.values[i]});
    return json{{"samples", samples},
                {"residual_norm", sol.residual_norm},
                {"normalization_gap", sol.normalization_gap},
                {"kernel_dim", sol.kernel_dim},
                {"alpha_inner", sol.alpha_inner},
                {"alpha_outer", sol.alpha_outer}};
}

json to_json(const DecayFit& fit) {
    return json{{"model", to_string(fit.model)},
                {"parameter", fit.parameter},
                {"residual", fit.residual}};
}

json to_json(const DecayClassification& c) {
    return json{{"model", to_string(c.model)},
                {"parameter", c.parameter},
                {"margin", c.margin},
                {"verdict", to_string(c.verdict)},
                {"power", to_json(c.power)},
                {"logpower", to_json(c.logpower)}};
}

json to_json(const GridScalarField& g) {
    return json{{"m", g.m}, {"lo", g.lo}, {"hi", g.hi}, {"shape", g.shape}, {"values", g.values}};
}

GridScalarField grid_from_json(const json& j) {
    GridScalarField g;
    g.m = j.at("m").get<int>();
    g.lo = j.at("lo").get<std::vector<double>>();
    g.hi = j.at("hi").get<std::vector<double>>();
    g.shape = j.at("shape").get<std::vector<int>>();
    g.values = j.at("values").get<std::vector<double>>();
    g.validate();
    return g;
}

GridScalarField read_grid_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open grid file: " + path);
    std::string first;
    std::getline(in, first);
    if (first.rfind("conecalc-grid", 0) == 0) {
        std::istringstream hs(first.substr(std::string("conecalc-grid").size()));
        GridScalarField g;
        if (!(hs >> g.m)) throw Error(ErrorCode::InvalidInput, "bad grid header");
        g.shape.resize(g.m);
        g.lo.resize(g.m);
        g.hi.resize(g.m);
        for (int a = 0; a < g.m; ++a)
            if (!(hs >> g.shape[a])) throw Error(ErrorCode::InvalidInput, "bad grid header shape");
        for (int a = 0; a < g.m; ++a)
            if (!(hs >> g.lo[a])) throw Error(ErrorCode::InvalidInput, "bad grid header lo");
        for (int a = 0; a < g.m; ++a)
            if (!(hs >> g.hi[a])) throw Error(ErrorCode::InvalidInput, "bad grid header hi");
        g.values.resize(g.node_count());
        in.read(reinterpret_cast<char*>(g.values.data()),
                static_cast<std::streamsize>(g.values.size() * sizeof(double)));
        if (in.gcount() != static_cast<std::streamsize>(g.values.size() * sizeof(double)))
            throw Error(ErrorCode::InvalidInput, "truncated grid payload");
        g.validate();
        return g;
    }
    // Fall back to the JSON layout.
    in.clear();
    in.seekg(0);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("bad grid JSON: ") + e.what());
    }
    return grid_from_json(j);
}

void write_grid_binary(const GridScalarField& g, const std::string& path) {
    g.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot open output file: " + path);
    out << "conecalc-grid " << g.m;
    for (int s : g.shape) out << " " << s;
    out.precision(17);
    for (double v : g.lo) out << " " << v;
    for (double v : g.hi) out << " " << v;
    out << "\n";
    out.write(reinterpret_cast<const char*>(g.values.data()),
              static_cast<std::streamsize>(g.values.size() * sizeof(double)));
}

}  // namespace conecalc
