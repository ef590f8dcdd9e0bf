// conecalc: spectral data of Riemannian cone links and the weighted
// Fredholm calculus built on it. One JSON report per run, deterministic for
// fixed inputs; no timestamps in the body. Exit codes: 0 success, 1 invalid
// input, 2 numerical failure, 3 Fredholm wall or indeterminate verdict.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "conecalc/annulus.hpp"
#include "conecalc/decay.hpp"
#include "conecalc/error.hpp"
#include "conecalc/indicial.hpp"
#include "conecalc/json_io.hpp"
#include "conecalc/parallel.hpp"
#include "conecalc/radial.hpp"
#include "conecalc/simd.hpp"
#include "conecalc/slgraph.hpp"
#include "conecalc/spectrum.hpp"

using namespace conecalc;

namespace {

void emit(const json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        write_json_file(report, out_path);
    }
}

json make_report(const std::string& command, json inputs, json tolerances,
                 const std::string& formula, json results) {
    return json{{"command", command},
                {"status", "ok"},
                {"inputs", std::move(inputs)},
                {"tolerances", std::move(tolerances)},
                {"formula", formula},
                {"results", std::move(results)},
                {"environment",
                 {{"simd_backend", simd::backend_name()}, {"threads", thread_budget()}}}};
}

TriMesh load_link(const std::string& name) {
    // "icosphere:L", "torus-grid:N", or a path to an OFF file.
    if (name.rfind("icosphere:", 0) == 0)
        return icosphere(std::stoi(name.substr(10)));
    if (name.rfind("torus-grid:", 0) == 0)
        return flat_torus_mesh(std::stoi(name.substr(11)));
    return read_off_file(name);
}

// Annulus field files: JSON {"shells":S,"vertices":V,"values":[...]} or
// binary "conecalc-field S V\n" + raw doubles, radial-major.
std::vector<double> read_annulus_values(const std::string& path, int shells, int vertices) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open field file: " + path);
    std::string first;
    std::getline(in, first);
    std::vector<double> values;
    int fs = 0, fv = 0;
    if (first.rfind("conecalc-field", 0) == 0) {
        std::istringstream hs(first.substr(std::string("conecalc-field").size()));
        if (!(hs >> fs >> fv)) throw Error(ErrorCode::InvalidInput, "bad field header");
        values.resize(static_cast<std::size_t>(fs) * fv);
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double)))
            throw Error(ErrorCode::InvalidInput, "truncated field payload");
    } else {
        in.clear();
        in.seekg(0);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidInput, std::string("bad field JSON: ") + e.what());
        }
        fs = j.at("shells").get<int>();
        fv = j.at("vertices").get<int>();
        values = j.at("values").get<std::vector<double>>();
    }
    if (fs != shells || fv != vertices ||
        values.size() != static_cast<std::size_t>(shells) * vertices)
        throw Error(ErrorCode::InvalidInput,
                    "field dimensions do not match the requested annulus (radial-major "
                    "shells x vertices expected)");
    return values;
}

struct SpectrumSourceFlags {
    std::string spectrum_file;
    int sphere_m = 0;
    int sphere_degree = 8;
    int clifford_m = 0;
    double lambda_max = 0.0;

    SpectrumTable load(json& inputs) const {
        int ways = (!spectrum_file.empty()) + (sphere_m > 0) + (clifford_m > 0);
        if (ways != 1)
            throw Error(ErrorCode::InvalidInput,
                        "choose exactly one of --spectrum, --sphere, --clifford");
        if (!spectrum_file.empty()) {
            inputs["spectrum"] = spectrum_file;
            return read_spectrum_file(spectrum_file);
        }
        if (sphere_m > 0) {
            inputs["sphere_m"] = sphere_m;
            inputs["degree_max"] = sphere_degree;
            return sphere_spectrum(sphere_m, sphere_degree);
        }
        inputs["clifford_m"] = clifford_m;
        double lmax = lambda_max > 0.0 ? lambda_max : 3.0 * (clifford_m + 1) + 1.0;
        inputs["lambda_max"] = lmax;
        return flat_torus_spectrum(clifford_link_lattice(clifford_m), lmax);
    }
};

int run_cli(int argc, char** argv) {
    CLI::App app{"spectral data of cone links and the weighted Fredholm calculus"};
    app.require_subcommand(1);
    std::string out_path;
    app.add_option("-o,--output", out_path, "write the JSON report here (default: stdout)");

    // ---- spectrum ----------------------------------------------------------
    auto* sp = app.add_subcommand("spectrum", "link Laplacian eigenvalue tables");
    int sp_sphere_m = 0, sp_degree = 4, sp_clifford = 0, sp_count = 9;
    int sp_torus_grid = 0, sp_icosphere = -1;
    double sp_lambda_max = 0.0, sp_tol = 1e-9, sp_cluster = 1e-6;
    std::string sp_mesh, sp_lattice;
    std::uint64_t sp_seed = 20240601;
    sp->add_option("--sphere", sp_sphere_m, "round sphere link of the cone R^m");
    sp->add_option("--degree-max", sp_degree, "highest harmonic degree for --sphere");
    sp->add_option("--torus", sp_lattice, "lattice JSON file for a flat torus link");
    sp->add_option("--clifford", sp_clifford, "diagonal torus link of C^m");
    sp->add_option("--lambda-max", sp_lambda_max, "eigenvalue coverage for torus links");
    sp->add_option("--mesh", sp_mesh, "OFF mesh of a closed surface link (FEM backend)");
    sp->add_option("--icosphere", sp_icosphere, "built-in icosphere level (FEM backend)");
    sp->add_option("--torus-grid", sp_torus_grid, "built-in unit-square torus grid (FEM)");
    sp->add_option("--count", sp_count, "number of eigenvalues for the FEM backend");
    sp->add_option("--tol", sp_tol, "FEM eigenpair residual tolerance");
    sp->add_option("--cluster-tol", sp_cluster, "relative eigenvalue clustering tolerance");
    sp->add_option("--seed", sp_seed, "FEM iteration seed");

    // ---- weights -----------------------------------------------------------
    auto* wt = app.add_subcommand("weights", "Fredholm verdict and index for a weight vector");
    std::vector<std::string> wt_spectra;
    std::vector<double> wt_betas;
    std::vector<int> wt_ms;
    std::string wt_convention = "conical";
    double wt_lo = 0.0, wt_hi = 0.0;
    bool wt_window_set = false;
    wt->add_option("--spectrum", wt_spectra, "spectrum JSON per cone")->required();
    wt->add_option("--m", wt_ms, "cone dimension per cone")->required();
    wt->add_option("--beta", wt_betas, "weight per cone")->required();
    wt->add_option("--convention", wt_convention, "conical | ac");
    auto* wt_lo_opt = wt->add_option("--lo", wt_lo, "exceptional-set window low end");
    wt->add_option("--hi", wt_hi, "exceptional-set window high end");
    wt->callback([&] { wt_window_set = wt_lo_opt->count() > 0; });

    // ---- rate --------------------------------------------------------------
    auto* rt = app.add_subcommand("rate", "rate admissibility, supremum, bootstrap, windows");
    SpectrumSourceFlags rt_src;
    int rt_m = 3;
    double rt_mu = 0.0, rt_trace_from = 0.0, rt_component = 0.0, rt_ac_lambda = 0.0;
    bool rt_has_mu = false, rt_has_trace = false, rt_has_component = false, rt_has_ac = false;
    bool rt_y_zero = true;
    rt->add_option("--spectrum", rt_src.spectrum_file, "spectrum JSON file");
    rt->add_option("--sphere", rt_src.sphere_m, "use the round sphere spectrum");
    rt->add_option("--clifford", rt_src.clifford_m, "use the diagonal torus spectrum");
    rt->add_option("--lambda-max", rt_src.lambda_max, "coverage for --clifford");
    rt->add_option("--degree-max", rt_src.sphere_degree, "coverage for --sphere");
    rt->add_option("--m", rt_m, "cone dimension")->required();
    auto* omu = rt->add_option("--mu", rt_mu, "check admissibility of this conical rate");
    auto* otr = rt->add_option("--trace-from", rt_trace_from, "bootstrap trace seed in (2,3)");
    auto* oco = rt->add_option("--component", rt_component, "AC rate window around this rate");
    auto* oac = rt->add_option("--ac-improve", rt_ac_lambda, "AC rate improvement from this rate");
    rt->add_flag("--y-zero,!--no-y-zero", rt_y_zero,
                 "obstruction class at infinity vanishes (default true)");
    rt->callback([&] {
        rt_has_mu = omu->count() > 0;
        rt_has_trace = otr->count() > 0;
        rt_has_component = oco->count() > 0;
        rt_has_ac = oac->count() > 0;
    });

    // ---- rigidity ----------------------------------------------------------
    auto* rg = app.add_subcommand("rigidity", "eigenvalue-2m rigidity certificate");
    SpectrumSourceFlags rg_src;
    int rg_m = 0, rg_dim_g = -1;
    rg->add_option("--spectrum", rg_src.spectrum_file, "spectrum JSON file");
    rg->add_option("--sphere", rg_src.sphere_m, "round sphere link");
    rg->add_option("--clifford", rg_src.clifford_m, "diagonal torus link");
    rg->add_option("--lambda-max", rg_src.lambda_max, "coverage for --clifford");
    rg->add_option("--degree-max", rg_src.sphere_degree, "coverage for --sphere");
    rg->add_option("--m", rg_m, "cone dimension (inferred for --sphere/--clifford)");
    rg->add_option("--dim-g", rg_dim_g, "stabilizer dimension (defaults per link family)");

    // ---- solve -------------------------------------------------------------
    auto* sv = app.add_subcommand("solve", "per-mode radial two-point solve");
    RadialBVP sv_bvp;
    double sv_g_const = 0.0, sv_g_power = 0.0, sv_tol = 1e-8;
    int sv_nodes = 200;
    sv->add_option("--m", sv_bvp.m, "cone dimension")->required();
    sv->add_option("--lambda", sv_bvp.eigenvalue, "link eigenvalue of the mode")->required();
    sv->add_option("--r0", sv_bvp.r0, "inner radius")->required();
    sv->add_option("--r1", sv_bvp.r1, "outer radius")->required();
    sv->add_option("--alpha-in", sv_bvp.alpha_inner, "inner branch exponent")->required();
    sv->add_option("--alpha-out", sv_bvp.alpha_outer, "outer branch exponent")->required();
    sv->add_option("--outer-value", sv_bvp.outer_value, "normalization datum f(r1)");
    sv->add_option("--g-const", sv_g_const, "right-hand side g = c");
    sv->add_option("--g-power", sv_g_power, "right-hand side g = c r^p (pass p; c via --g-const)");
    sv->add_option("--nodes", sv_nodes, "grid nodes");
    sv->add_option("--tol", sv_tol, "interior residual tolerance");

    // ---- norm --------------------------------------------------------------
    auto* nm = app.add_subcommand("norm", "weighted norms and dual pairing on a cone annulus");
    std::string nm_link = "icosphere:3", nm_field, nm_pair_field;
    int nm_m = 3, nm_shells = 129, nm_k = 0;
    double nm_r0 = 1e-2, nm_r1 = 1.0, nm_beta = 0.0, nm_p = 0.0, nm_q = 0.0;
    double nm_power_beta = 0.0, nm_link_volume = 0.0;
    bool nm_power_set = false;
    nm->add_option("--link", nm_link, "icosphere:L | torus-grid:N | OFF file");
    nm->add_option("--m", nm_m, "cone dimension");
    nm->add_option("--r0", nm_r0, "inner radius");
    nm->add_option("--r1", nm_r1, "outer radius");
    nm->add_option("--shells", nm_shells, "radial quadrature shells");
    nm->add_option("--link-volume", nm_link_volume,
                   "exact link volume for quadrature rescaling (0: mesh area)");
    nm->add_option("--field", nm_field, "field file (JSON or conecalc-field binary)");
    auto* opb = nm->add_option("--power-beta", nm_power_beta,
                               "use the built-in field rho^beta instead of --field");
    nm->add_option("--beta", nm_beta, "weight");
    nm->add_option("--k", nm_k, "derivative order (0..2)");
    nm->add_option("--p", nm_p, "Lebesgue exponent (omit for the sup norm)");
    nm->add_option("--q", nm_q, "dual exponent (pairing mode)");
    nm->add_option("--pair-field", nm_pair_field, "second field: compute the dual pairing");
    nm->callback([&] { nm_power_set = opb->count() > 0; });

    // ---- slgraph -----------------------------------------------------------
    auto* sl = app.add_subcommand("slgraph", "flat special-Lagrangian graph operator");
    std::string sl_potential, sl_field_out, sl_eta_file;
    std::vector<std::string> sl_one_form;
    std::vector<double> sl_t_values;
    double sl_mu_hint = 2.5, sl_closed_tol = 1e-3;
    bool sl_defect = false;
    sl->add_option("--potential", sl_potential, "grid potential A (JSON or binary)");
    sl->add_flag("--defect", sl_defect, "evaluate the graph defect of --potential");
    sl->add_option("--linearize", sl_t_values, "remainder table at these scales");
    sl->add_option("--one-form", sl_one_form, "m grid files: Lagrangian closedness residual");
    sl->add_option("--eta", sl_eta_file, "cone-annulus 1-form JSON: radial potential split");
    sl->add_option("--mu-hint", sl_mu_hint, "expected decay rate for the inner tail");
    sl->add_option("--closedness-tol", sl_closed_tol, "closedness tolerance for --eta");
    sl->add_option("--field-out", sl_field_out, "write the defect field here (binary)");

    // ---- decay -------------------------------------------------------------
    auto* dc = app.add_subcommand("decay", "power-law vs log decay classification");
    std::string dc_csv, dc_model = "auto";
    SpectrumSourceFlags dc_src;
    int dc_m = 3;
    double dc_margin = 1.2;
    dc->add_option("--csv", dc_csv, "decay series CSV (r,y per line)")->required();
    dc->add_option("--model", dc_model, "power | logpower | auto");
    dc->add_option("--spectrum", dc_src.spectrum_file, "spectrum for the admissibility screen");
    dc->add_option("--sphere", dc_src.sphere_m, "use the round sphere spectrum");
    dc->add_option("--degree-max", dc_src.sphere_degree, "coverage for --sphere");
    dc->add_option("--m", dc_m, "cone dimension for the admissibility screen");
    dc->add_option("--margin-threshold", dc_margin, "residual ratio below which no verdict");

    // Global options (like -o) may appear after subcommand flags.
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    // ---------------- dispatch ----------------
    if (sp->parsed()) {
        json inputs, tol;
        SpectrumTable table;
        std::string formula;
        int sources = (sp_sphere_m > 0) + (!sp_lattice.empty()) + (sp_clifford > 0) +
                      (!sp_mesh.empty()) + (sp_icosphere >= 0) + (sp_torus_grid > 0);
        if (sources != 1)
            throw Error(ErrorCode::InvalidInput,
                        "choose exactly one of --sphere, --torus, --clifford, --mesh, "
                        "--icosphere, --torus-grid");
        if (sp_sphere_m > 0) {
            inputs = {{"sphere_m", sp_sphere_m}, {"degree_max", sp_degree}};
            table = sphere_spectrum(sp_sphere_m, sp_degree);
            formula = "lambda_k = k (k + m - 2), mult_k = dim(harmonic degree-k polynomials)";
        } else if (!sp_lattice.empty() || sp_clifford > 0) {
            if (sp_lambda_max <= 0.0)
                throw Error(ErrorCode::InvalidInput, "torus spectra need --lambda-max > 0");
            LatticeBasis lattice;
            if (!sp_lattice.empty()) {
                std::ifstream in(sp_lattice);
                if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + sp_lattice);
                json lj;
                in >> lj;
                lattice = lattice_from_json(lj);
                inputs["lattice"] = sp_lattice;
            } else {
                lattice = clifford_link_lattice(sp_clifford);
                inputs["clifford_m"] = sp_clifford;
            }
            inputs["lambda_max"] = sp_lambda_max;
            table = flat_torus_spectrum(lattice, sp_lambda_max);
            formula = "lambda = 4 pi^2 |mu|^2 over dual-lattice vectors mu";
        } else {
            TriMesh mesh;
            if (!sp_mesh.empty()) {
                mesh = read_off_file(sp_mesh);
                inputs["mesh"] = sp_mesh;
            } else if (sp_icosphere >= 0) {
                mesh = icosphere(sp_icosphere);
                inputs["icosphere"] = sp_icosphere;
            } else {
                mesh = flat_torus_mesh(sp_torus_grid);
                inputs["torus_grid"] = sp_torus_grid;
            }
            FemOptions opts;
            opts.tol = sp_tol;
            opts.cluster_tol = sp_cluster;
            opts.seed = sp_seed;
            inputs["count"] = sp_count;
            inputs["seed"] = sp_seed;
            tol = {{"eig_residual", sp_tol}, {"cluster_tol", sp_cluster}};
            table = fem_spectrum(mesh, sp_count, opts);
            formula = "K v = lambda M v, cotangent stiffness K, lumped mass M";
        }
        tol["cluster_tol"] = table.cluster_tol;
        emit(make_report("spectrum", inputs, tol, formula, to_json(table)), out_path);
        return 0;
    }

    if (wt->parsed()) {
        if (wt_spectra.size() != wt_betas.size() || wt_spectra.size() != wt_ms.size())
            throw Error(ErrorCode::InvalidInput,
                        "--spectrum, --m and --beta must repeat in matching numbers");
        std::vector<SpectrumTable> tables;
        std::vector<ExceptionalSet> sets;
        for (std::size_t i = 0; i < wt_spectra.size(); ++i) {
            tables.push_back(read_spectrum_file(wt_spectra[i]));
            double lo = wt_window_set ? wt_lo : 2.0 - wt_ms[i] - 3.0;
            double hi = wt_window_set ? wt_hi : 3.0;
            sets.push_back(exceptional_set(tables.back(), wt_ms[i], lo, hi));
        }
        WeightVector wv;
        wv.betas = wt_betas;
        for (const auto& s : sets) wv.cones.push_back(&s);
        IndexConvention conv = (wt_convention == "ac") ? IndexConvention::Ac
                                                       : IndexConvention::Conical;
        if (wt_convention != "ac" && wt_convention != "conical")
            throw Error(ErrorCode::InvalidInput, "--convention must be conical or ac");
        IndexReport rep = fredholm_index(wv, conv);
        json inputs{{"spectra", wt_spectra}, {"m", wt_ms}, {"beta", wt_betas},
                    {"convention", wt_convention}};
        json results = to_json(rep);
        json sets_json = json::array();
        for (const auto& s : sets) sets_json.push_back(to_json(s));
        results["exceptional_sets"] = sets_json;
        std::string formula = conv == IndexConvention::Conical
                                  ? "index = -sum_i N_i(beta_i); Fredholm iff no beta_i is a root"
                                  : "index = +N(beta); Fredholm iff beta is not a root";
        emit(make_report("weights", inputs, {{"wall_tol", "1e-9*(1+|alpha|)"}}, formula, results),
             out_path);
        return 0;
    }

    if (rt->parsed()) {
        json inputs;
        SpectrumTable table = rt_src.load(inputs);
        inputs["m"] = rt_m;
        double lo = 2.0 - rt_m - 3.0, hi = 3.5;
        ExceptionalSet D = exceptional_set(table, rt_m, lo, hi);
        json results;
        if (rt_has_mu) {
            results["mu"] = rt_mu;
            results["admissible"] = rate_admissible(D, rt_mu);
        }
        results["rate_sup"] = rate_sup(D);
        results["rate_sup_exclusive"] = true;
        if (rt_has_trace) results["bootstrap_trace"] = bootstrap_trace(rt_trace_from);
        if (rt_has_component) {
            auto c = rate_component(D, rt_component);
            results["component"] = {{"lambda", rt_component}, {"window", {c.first, c.second}}};
        }
        if (rt_has_ac) {
            auto imp = ac_rate_improve(D, rt_m, rt_ac_lambda, rt_y_zero);
            results["ac_improvement"] = {{"lambda", rt_ac_lambda},
                                         {"y_is_zero", rt_y_zero},
                                         {"best_rate", imp.best_rate},
                                         {"exclusive", imp.exclusive}};
        }
        emit(make_report("rate", inputs, {{"wall_tol", "1e-9*(1+|alpha|)"}},
                         "admissible iff (2, mu] has no root; sup = min(3, first root in "
                         "(2,3)); bootstrap lambda' = min(3, 2 lambda - 2)",
                         results),
             out_path);
        return 0;
    }

    if (rg->parsed()) {
        json inputs;
        SpectrumTable table = rg_src.load(inputs);
        int m = rg_m;
        if (m == 0) {
            if (rg_src.sphere_m > 0) m = rg_src.sphere_m;
            else if (rg_src.clifford_m > 0) m = rg_src.clifford_m;
            else
                throw Error(ErrorCode::InvalidInput, "--m is required with --spectrum");
        }
        int dim_g = rg_dim_g;
        if (dim_g < 0) {
            if (rg_src.sphere_m > 0) dim_g = m * (m - 1) / 2;       // rotation stabilizer
            else if (rg_src.clifford_m > 0) dim_g = m - 1;          // diagonal torus stabilizer
            else
                throw Error(ErrorCode::InvalidInput, "--dim-g is required with --spectrum");
        }
        inputs["m"] = m;
        inputs["dim_g"] = dim_g;
        RigidityReport rep = rigidity_test(table, m, dim_g);
        emit(make_report("rigidity", inputs, {{"cluster_tol", table.cluster_tol}},
                         "rigid iff mult(2m) = m^2 - 1 - dim G", to_json(rep)),
             out_path);
        return 0;
    }

    if (sv->parsed()) {
        double c = sv_g_const, pw = sv_g_power;
        sv_bvp.rhs = [c, pw](double r) { return c * std::pow(r, pw); };
        RadialSolution sol = mode_poisson_solve(sv_bvp, sv_nodes, sv_tol);
        json inputs{{"m", sv_bvp.m},        {"lambda", sv_bvp.eigenvalue},
                    {"r0", sv_bvp.r0},      {"r1", sv_bvp.r1},
                    {"alpha_in", sv_bvp.alpha_inner}, {"alpha_out", sv_bvp.alpha_outer},
                    {"outer_value", sv_bvp.outer_value},
                    {"g_const", c},         {"g_power", pw},
                    {"nodes", sv_nodes}};
        emit(make_report("solve", inputs, {{"residual_tol", sv_tol}},
                         "-f'' - (m-1) f'/r + lambda f/r^2 = g, Robin f' = (alpha/r) f",
                         to_json(sol)),
             out_path);
        return 0;
    }

    if (nm->parsed()) {
        auto annulus = std::make_shared<ConeAnnulus>(load_link(nm_link), nm_m, nm_r0, nm_r1,
                                                     nm_shells, nm_link_volume);
        json inputs{{"link", nm_link}, {"m", nm_m},     {"r0", nm_r0},
                    {"r1", nm_r1},     {"shells", annulus->shell_count()},
                    {"beta", nm_beta}, {"k", nm_k}};
        SampledField f;
        if (nm_power_set) {
            f = make_power_field(annulus, nm_power_beta);
            inputs["power_beta"] = nm_power_beta;
        } else if (!nm_field.empty()) {
            f.annulus = annulus;
            f.values = read_annulus_values(nm_field, annulus->shell_count(),
                                           annulus->vertex_count());
            if (nm_k >= 1) attach_gradient(f);
            if (nm_k >= 2) attach_hessian_radial(f);
            inputs["field"] = nm_field;
        } else {
            throw Error(ErrorCode::InvalidInput, "provide --field or --power-beta");
        }

        json results;
        std::string formula;
        if (!nm_pair_field.empty()) {
            SampledField g;
            g.annulus = annulus;
            g.values = read_annulus_values(nm_pair_field, annulus->shell_count(),
                                           annulus->vertex_count());
            if (nm_p <= 0.0 || nm_q <= 0.0)
                throw Error(ErrorCode::InvalidInput, "pairing needs --p and --q");
            PairingResult pr = dual_pairing(f, g, nm_p, nm_q, nm_beta);
            results = {{"pairing", pr.pairing}, {"holder_bound", pr.holder_bound}};
            inputs["pair_field"] = nm_pair_field;
            inputs["p"] = nm_p;
            inputs["q"] = nm_q;
            formula = "<u,v> = int u v dV <= ||u||_{p,0,beta} ||v||_{q,0,-beta-m}";
        } else if (nm_p > 0.0) {
            results = {{"norm", weighted_lp_norm(f, nm_p, nm_beta, nm_k)}};
            inputs["p"] = nm_p;
            formula = "(sum_j int |rho^{-beta+j} D^j f|^p rho^{-m} dV)^{1/p}";
        } else {
            results = {{"norm", weighted_ck_norm(f, nm_beta, nm_k)}};
            formula = "sum_j sup |rho^{-beta+j} D^j f|";
        }
        emit(make_report("norm", inputs, {{"quadrature", "composite Simpson in log r"}},
                         formula, results),
             out_path);
        return 0;
    }

    if (sl->parsed()) {
        json inputs, results;
        std::string formula;
        if (!sl_one_form.empty()) {
            std::vector<GridScalarField> comps;
            for (const auto& p : sl_one_form) comps.push_back(read_grid_file(p));
            results = {{"lagrangian_residual", lagrangian_residual(comps)}};
            inputs["one_form"] = sl_one_form;
            formula = "max |d eta| by central differences; 0 iff the graph is Lagrangian";
        } else if (!sl_eta_file.empty()) {
            std::ifstream in(sl_eta_file);
            if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + sl_eta_file);
            json ej;
            in >> ej;
            auto annulus = std::make_shared<ConeAnnulus>(
                load_link(ej.at("link").get<std::string>()), ej.at("m").get<int>(),
                ej.at("r0").get<double>(), ej.at("r1").get<double>(),
                ej.at("shells").get<int>());
            OneFormSamples eta;
            eta.annulus = annulus;
            eta.edges = link_edges(annulus->link());
            eta.angular = ej.at("angular").get<std::vector<double>>();
            eta.radial = ej.at("radial").get<std::vector<double>>();
            RadialPotential rp = radial_potential(eta, sl_mu_hint, sl_closed_tol);
            results = {{"tail_exponent", rp.tail_exponent},
                       {"residual", rp.residual},
                       {"gamma_hat", rp.gamma_hat},
                       {"potential", rp.potential.values}};
            inputs["eta"] = sl_eta_file;
            inputs["mu_hint"] = sl_mu_hint;
            formula = "A(sigma,r) = int_0^r eta_radial ds; gamma_hat = eta_angular - d_link A";
        } else if (!sl_potential.empty()) {
            GridScalarField A = read_grid_file(sl_potential);
            inputs["potential"] = sl_potential;
            if (sl_defect && !sl_t_values.empty())
                throw Error(ErrorCode::InvalidInput, "--defect and --linearize are exclusive");
            if (!sl_t_values.empty()) {
                auto rows = linearization_check(A, sl_t_values);
                json table = json::array();
                for (const auto& r : rows)
                    table.push_back({{"t", r.t},
                                     {"remainder", r.remainder},
                                     {"remainder_over_t2", r.remainder_over_t2}});
                results = {{"linearization", table}};
                formula = "remainder(t) = max |F(tA) - t (-d*dA)| = O(t^2), cubic in the flat model";
            } else {
                GraphDefect d = graph_defect(A);
                results = {{"max_abs", d.max_abs}, {"max_abs_interior", d.max_abs_interior}};
                if (!sl_field_out.empty()) {
                    write_grid_binary(d.field, sl_field_out);
                    results["field_out"] = sl_field_out;
                }
                formula = "F = Im det(I + i Hess A); F = 0 iff the graph of dA is special";
            }
        } else {
            throw Error(ErrorCode::InvalidInput,
                        "provide --potential, --one-form or --eta");
        }
        emit(make_report("slgraph", inputs, {{"closedness_tol", sl_closed_tol}}, formula,
                         results),
             out_path);
        return 0;
    }

    if (dc->parsed()) {
        DecaySeries series = read_decay_csv(dc_csv);
        json inputs{{"csv", dc_csv}, {"model", dc_model}};
        json results;
        std::string formula =
            "power: log y ~ (mu-1) log r; logpower: log y - log r ~ -alpha log|log r|";
        if (dc_model == "power") {
            results = to_json(fit_decay(series, DecayModel::Power));
        } else if (dc_model == "logpower") {
            results = to_json(fit_decay(series, DecayModel::LogPower));
        } else {
            std::optional<ExceptionalSet> D;
            if (!dc_src.spectrum_file.empty() || dc_src.sphere_m > 0) {
                SpectrumTable table = dc_src.load(inputs);
                int m = dc_src.sphere_m > 0 ? dc_src.sphere_m : dc_m;
                inputs["m"] = m;
                D = exceptional_set(table, m, 2.0 - m - 1.0, 3.5);
            }
            DecayClassification c = classify_decay(series, D ? &*D : nullptr, dc_margin);
            results = to_json(c);
        }
        emit(make_report("decay", inputs, {{"margin_threshold", dc_margin}}, formula, results),
             out_path);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const Error& e) {
        json report{{"command", argc > 1 ? argv[1] : ""},
                    {"status", "error"},
                    {"error", {{"code", e.code_name()}, {"message", e.what()}}}};
        std::cout << report.dump(2) << "\n";
        return e.exit_status();
    } catch (const std::exception& e) {
        json report{{"command", argc > 1 ? argv[1] : ""},
                    {"status", "error"},
                    {"error", {{"code", "invalid-input"}, {"message", e.what()}}}};
        std::cout << report.dump(2) << "\n";
        return 1;
    }
}
