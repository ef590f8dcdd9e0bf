#pragma once

#include <string>

#include <json.hpp>

#include "conecalc/decay.hpp"
#include "conecalc/indicial.hpp"
#include "conecalc/radial.hpp"
#include "conecalc/slgraph.hpp"
#include "conecalc/spectrum.hpp"

namespace conecalc {

using json = nlohmann::json;

// Spectrum documents:
// {"link_dim":..., "coverage_max":..., "entries":[{"lambda":..., "mult":...}],
//  "source":..., "cluster_tol":...}
json to_json(const SpectrumTable& table);
SpectrumTable spectrum_from_json(const json& j);
SpectrumTable read_spectrum_file(const std::string& path);
void write_json_file(const json& j, const std::string& path);

json to_json(const LatticeBasis& lattice);
LatticeBasis lattice_from_json(const json& j);

json to_json(const IndicialRoot& root);
json to_json(const ExceptionalSet& set);
json to_json(const IndexReport& report);
json to_json(const RigidityReport& report);
json to_json(const RadialSolution& sol);
json to_json(const DecayFit& fit);
json to_json(const DecayClassification& c);

// Grid fields:
// JSON {"m":..., "lo":[...], "hi":[...], "shape":[...], "values":[...]}
// or row-major binary with a one-line text header
// "conecalc-grid m shape... lo... hi...\n" followed by raw little-endian doubles.
json to_json(const GridScalarField& g);
GridScalarField grid_from_json(const json& j);
GridScalarField read_grid_file(const std::string& path);
void write_grid_binary(const GridScalarField& g, const std::string& path);

}  // namespace conecalc
