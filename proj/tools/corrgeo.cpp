// Command-line surface: build correlation geometries from model files or
// built-in generators, compare them, and run the gauge / diffeo /
// symmetry / mixing / dimension checks.
//
// Exit codes: 0 success or equivalent, 1 inequivalent or asymmetric,
// 2 inconclusive, 64 usage or parse error, 66 missing file,
// 70 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <corrgeo/equivalence.hpp>
#include <corrgeo/io.hpp>
#include <corrgeo/mixing.hpp>
#include <corrgeo/model.hpp>

namespace {

using namespace corrgeo;

constexpr int kExitOk = 0;
constexpr int kExitInequivalent = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;
constexpr int kExitNumerical = 70;

// FNV-1a over file bytes, for provenance hashes in run reports.
std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::ios_base::failure("cannot open " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

struct RunReport {
    std::string command;
    Json inputs = Json::array();
    Json parameters = Json::object();
    Json outputs = Json::array();
    unsigned seed = 0;
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();

    void add_input(const std::string& path) {
        inputs.push_back({{"path", path}, {"hash", file_hash(path)}});
    }
    void add_output(const std::string& path) { outputs.push_back(path); }

    // Written to stderr so stdout stays byte-deterministic.
    void emit(const Json& verdicts = Json::object()) const {
        Json j;
        j["command"] = command;
        j["inputs"] = inputs;
        j["parameters"] = parameters;
        j["outputs"] = outputs;
        j["seed"] = seed;
        j["verdicts"] = verdicts;
        j["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::cerr << j.dump() << '\n';
    }
};

struct BuiltinParams {
    std::string name;
    int n = 16;
    int kmax = 1;
    int mfields = 6;
    double spacing = 1.0;
    double mass = 1.0;
    double charge = 1.0;
    double potential = 0.0; // constant A for the lattice model
};

void add_builtin_options(CLI::App* cmd, BuiltinParams& p) {
    cmd->add_option("--builtin", p.name,
                    "circle-plane-waves | circle-trig-pair | torus-tetrads | "
                    "lattice-dirac-sea");
    cmd->add_option("--n", p.n, "points per dimension / lattice sites");
    cmd->add_option("--kmax", p.kmax, "plane-wave bandwidth");
    cmd->add_option("--mfields", p.mfields, "Dirac sea size");
    cmd->add_option("--spacing", p.spacing, "lattice spacing");
    cmd->add_option("--mass", p.mass, "mass parameter");
    cmd->add_option("--charge", p.charge, "charge parameter");
    cmd->add_option("--potential", p.potential, "constant gauge potential A");
}

LatticeDiracModel lattice_from(const BuiltinParams& p) {
    LatticeDiracModel lat;
    lat.sites = p.n;
    lat.spacing = p.spacing;
    lat.mass = p.mass;
    lat.charge = p.charge;
    if (p.potential != 0.0)
        lat.potential = VectorR::Constant(p.n, p.potential);
    return lat;
}

EffectiveModel build_builtin(const BuiltinParams& p) {
    if (p.name == "circle-plane-waves")
        return circle_plane_waves(p.n, p.kmax);
    if (p.name == "circle-trig-pair")
        return circle_trig_pair(p.n);
    if (p.name == "torus-tetrads")
        return torus_tetrads(p.n);
    if (p.name == "lattice-dirac-sea")
        return lattice_dirac_sea(lattice_from(p), p.mfields);
    throw CLI::ValidationError("--builtin", "unknown builtin: " + p.name);
}

EffectiveModel load_model(const std::string& model_path, const BuiltinParams& p,
                          RunReport& report) {
    if (!model_path.empty()) {
        report.add_input(model_path);
        return model_from_json(load_json_file(model_path));
    }
    if (p.name.empty())
        throw CLI::ValidationError("build", "need a model file or --builtin");
    return build_builtin(p);
}

GaugeFunction make_chi(const EffectiveModel& m, const std::string& kind,
                       double scale, unsigned seed) {
    const int n = m.manifold.n_points();
    GaugeFunction chi;
    chi.values = VectorR::Zero(n);
    chi.jets.assign(n, VectorR::Zero(m.manifold.dim()));
    if (kind == "zero")
        return chi;
    if (kind == "const") {
        chi.values.setConstant(scale);
        return chi;
    }
    if (kind == "sin") {
        for (int k = 0; k < n; ++k) {
            double theta = m.manifold.coords[k](0);
            chi.values(k) = scale * std::sin(theta);
            chi.jets[k](0) = scale * std::cos(theta);
        }
        return chi;
    }
    if (kind == "random") {
        // random smooth trigonometric polynomial
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        for (int h = 1; h <= 3; ++h) {
            double a = scale * coef(rng), b = scale * coef(rng);
            for (int k = 0; k < n; ++k) {
                double theta = m.manifold.coords[k](0);
                chi.values(k) += a * std::cos(h * theta) + b * std::sin(h * theta);
                chi.jets[k](0) +=
                    h * (-a * std::sin(h * theta) + b * std::cos(h * theta));
            }
        }
        return chi;
    }
    throw CLI::ValidationError("--chi", "unknown chi profile: " + kind);
}

int verdict_exit(const EquivalenceVerdict& v) {
    switch (v.kind) {
    case EquivalenceVerdict::Kind::Equivalent:
        return kExitOk;
    case EquivalenceVerdict::Kind::Inequivalent:
        return kExitInequivalent;
    case EquivalenceVerdict::Kind::Inconclusive:
        return kExitInconclusive;
    }
    return kExitNumerical;
}

void write_or_print(const Json& j, const std::string& out_path,
                    RunReport& report) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        save_json_file(out_path, j);
        report.add_output(out_path);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"correlation geometry toolkit"};
    app.require_subcommand(1);

    double tol = 1e-8;
    double agg_tol = 1e-8;
    unsigned seed = 0;
    app.add_option("--tol", tol, "equivalence tolerance")->capture_default_str();
    app.add_option("--agg-tol", agg_tol, "atom aggregation tolerance")
        ->capture_default_str();
    app.add_option("--seed", seed, "seed for randomized procedures")
        ->capture_default_str();

    // build
    auto* build = app.add_subcommand("build", "build a geometry");
    std::string build_model_path, build_out;
    BuiltinParams build_params;
    build->add_option("model", build_model_path, "model JSON file");
    add_builtin_options(build, build_params);
    build->add_option("-o,--output", build_out, "geometry output path");

    // compare
    auto* compare = app.add_subcommand("compare", "compare two geometries");
    std::string cmp_g1, cmp_g2, cmp_out;
    compare->add_option("g1", cmp_g1, "first geometry")->required();
    compare->add_option("g2", cmp_g2, "second geometry")->required();
    compare->add_option("-o,--output", cmp_out, "verdict output path");

    // gauge-check
    auto* gauge = app.add_subcommand("gauge-check", "U(1) gauge redundancy check");
    BuiltinParams gauge_params;
    std::string gauge_model_path, gauge_chi = "sin";
    double gauge_q = 1.0, gauge_chi_scale = 1.0;
    gauge->add_option("model", gauge_model_path, "model JSON file");
    add_builtin_options(gauge, gauge_params);
    gauge->add_option("--chi", gauge_chi, "zero | const | sin | random");
    gauge->add_option("--chi-scale", gauge_chi_scale, "chi amplitude");
    gauge->add_option("--q", gauge_q, "gauge charge");

    // diffeo-check
    auto* diffeo = app.add_subcommand("diffeo-check", "diffeomorphism check");
    BuiltinParams diffeo_params;
    std::string diffeo_model_path;
    int diffeo_shift = 0;
    bool diffeo_reflect = false;
    diffeo->add_option("model", diffeo_model_path, "model JSON file");
    add_builtin_options(diffeo, diffeo_params);
    diffeo->add_option("--shift", diffeo_shift, "circle rotation in sites");
    diffeo->add_flag("--reflect", diffeo_reflect, "circle reflection");

    // symmetry-check
    auto* symm = app.add_subcommand("symmetry-check",
                                    "induced translation symmetry check");
    BuiltinParams symm_params;
    int symm_shift = 1;
    symm_params.name = "circle-plane-waves";
    add_builtin_options(symm, symm_params);
    symm->add_option("--shift", symm_shift, "translation in sites");

    // mix
    auto* mixcmd = app.add_subcommand("mix", "convex combination of measures");
    std::string mix_g1, mix_g2, mix_out, mix_aligner;
    double mix_tau = 0.5;
    mixcmd->add_option("g1", mix_g1, "first geometry")->required();
    mixcmd->add_option("g2", mix_g2, "second geometry")->required();
    mixcmd->add_option("--tau", mix_tau, "mixing weight of g2")
        ->capture_default_str();
    mixcmd->add_option("--aligner-from", mix_aligner,
                       "verdict JSON supplying the aligning unitary");
    mixcmd->add_option("-o,--output", mix_out, "geometry output path");

    // dim-check
    auto* dim = app.add_subcommand("dim-check",
                                   "regular stratum dimension check");
    int dim_f = 4, dim_p = 1, dim_q = 1, dim_trials = 4;
    dim->add_option("--f", dim_f, "Hilbert dimension")->required();
    dim->add_option("--p", dim_p, "positive eigenvalue bound")->required();
    dim->add_option("--q", dim_q, "negative eigenvalue bound")->required();
    dim->add_option("--trials", dim_trials, "random retries");

    // resolution-study
    auto* res = app.add_subcommand("resolution-study",
                                   "atom separation vs sampling resolution");
    BuiltinParams res_params;
    res_params.name = "circle-plane-waves";
    std::vector<int> res_ns = {8, 16, 32};
    std::string res_format = "json";
    add_builtin_options(res, res_params);
    res->add_option("--ns", res_ns, "resolutions to sweep");
    res->add_option("--format", res_format, "json | csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    }

    RunReport report;
    report.seed = seed;
    report.parameters["tol"] = tol;
    report.parameters["agg_tol"] = agg_tol;

    if (*build) {
        report.command = "build";
        EffectiveModel m = load_model(build_model_path, build_params, report);
        CorrelationGeometry g = pushforward(m, agg_tol);
        write_or_print(geometry_to_json(g), build_out, report);
        report.emit();
        return kExitOk;
    }

    if (*compare) {
        report.command = "compare";
        report.add_input(cmp_g1);
        report.add_input(cmp_g2);
        CorrelationGeometry g1 = geometry_from_json(load_json_file(cmp_g1));
        CorrelationGeometry g2 = geometry_from_json(load_json_file(cmp_g2));
        EquivalenceVerdict v = check_equivalence(g1, g2, tol, seed);
        Json vj = verdict_to_json(v);
        std::cout << vj.dump(2) << '\n';
        if (!cmp_out.empty()) {
            save_json_file(cmp_out, vj);
            report.add_output(cmp_out);
        }
        report.emit(vj);
        return verdict_exit(v);
    }

    if (*gauge) {
        report.command = "gauge-check";
        Json out;
        EquivalenceVerdict v;
        if (gauge_params.name == "lattice-dirac-sea" && gauge_model_path.empty()) {
            // gauge-shift the lattice potential and rebuild the sea
            LatticeDiracModel lat = lattice_from(gauge_params);
            if (lat.potential.size() == 0)
                lat.potential = VectorR::Zero(lat.sites);
            LatticeDiracModel shifted = lat;
            VectorR chi_values(lat.sites);
            for (int j = 0; j < lat.sites; ++j)
                chi_values(j) = gauge_chi_scale *
                                std::sin(2.0 * std::numbers::pi * j / lat.sites);
            for (int j = 0; j < lat.sites; ++j)
                shifted.potential(j) +=
                    (chi_values((j + 1) % lat.sites) - chi_values(j)) /
                    lat.spacing;
            EffectiveModel m1 = lattice_dirac_sea(lat, gauge_params.mfields);
            EffectiveModel m2 = lattice_dirac_sea(shifted, gauge_params.mfields);
            // gauge multiplication intertwines the seas; use it as a
            // witness hint to bridge the eigenbasis ambiguity
            GaugeFunction gf;
            gf.values = chi_values;
            EffectiveModel phased = apply_gauge_phase(m1, gf, lat.charge);
            std::vector<MatrixC> hints = {intertwiner_witness(
                gram(m1), gram(m2), cross_gram(m2, phased))};
            v = check_equivalence(pushforward(m1, agg_tol),
                                  pushforward(m2, agg_tol), tol, seed, hints);
            out["verdict"] = verdict_to_json(v);
        } else {
            EffectiveModel m = load_model(gauge_model_path, gauge_params, report);
            GaugeFunction chi = make_chi(m, gauge_chi, gauge_chi_scale, seed);
            GaugeReport rep = gauge_check(m, chi, gauge_q, tol, agg_tol);
            v = rep.verdict;
            out["max_form_deviation"] = rep.max_form_deviation;
            out["verdict"] = verdict_to_json(v);
        }
        std::cout << out.dump(2) << '\n';
        report.emit(out);
        return verdict_exit(v);
    }

    if (*diffeo) {
        report.command = "diffeo-check";
        EffectiveModel m = load_model(diffeo_model_path, diffeo_params, report);
        EffectiveModel moved =
            diffeo_reflect ? reflect_circle(m) : rotate_circle(m, diffeo_shift);
        EquivalenceVerdict v = check_equivalence(
            pushforward(m, agg_tol), pushforward(moved, agg_tol), tol, seed);
        Json vj = verdict_to_json(v);
        std::cout << vj.dump(2) << '\n';
        report.emit(vj);
        return verdict_exit(v);
    }

    if (*symm) {
        report.command = "symmetry-check";
        EffectiveModel m = build_builtin(symm_params);
        CorrelationGeometry g = pushforward(m, agg_tol);
        MatrixC u = induced_translation_unitary(m, symm_shift);
        SymmetryReport rep = check_symmetry(g, u, tol);
        Json out;
        out["symmetric"] = rep.symmetric;
        out["max_discrepancy"] = rep.max_discrepancy;
        out["max_weight_discrepancy"] = rep.max_weight_discrepancy;
        std::cout << out.dump(2) << '\n';
        report.emit(out);
        return rep.symmetric ? kExitOk : kExitInequivalent;
    }

    if (*mixcmd) {
        report.command = "mix";
        report.add_input(mix_g1);
        report.add_input(mix_g2);
        CorrelationGeometry g1 = geometry_from_json(load_json_file(mix_g1));
        CorrelationGeometry g2 = geometry_from_json(load_json_file(mix_g2));
        MixSpec spec;
        spec.tau = mix_tau;
        if (!mix_aligner.empty()) {
            report.add_input(mix_aligner);
            spec.aligner = unitary_from_verdict_json(load_json_file(mix_aligner));
        }
        CorrelationGeometry g = mix(g1, g2, spec, agg_tol);
        Json j = geometry_to_json(g);
        Json prov;
        prov["tau"] = mix_tau;
        if (!mix_aligner.empty())
            prov["aligner"] = io_detail::matrix_to_json(spec.aligner);
        prov["parent_hashes"] = {file_hash(mix_g1), file_hash(mix_g2)};
        j["provenance"] = prov;
        write_or_print(j, mix_out, report);
        Json diag;
        MixtureDiagnostics d = mixture_diagnostics(g);
        diag["atom_count"] = d.atom_count;
        diag["regular_mass_fraction"] = d.regular_mass_fraction;
        diag["spectral_spread"] = d.spectral_spread;
        report.emit(diag);
        return kExitOk;
    }

    if (*dim) {
        report.command = "dim-check";
        long formula = fpq_dimension(dim_f, {dim_p, dim_q});
        long measured = fpq_rank_check(dim_f, {dim_p, dim_q}, dim_trials, seed);
        Json out;
        out["formula"] = formula;
        out["measured_rank"] = measured;
        out["agree"] = (formula == measured);
        std::cout << out.dump(2) << '\n';
        report.emit(out);
        return formula == measured ? kExitOk : kExitInequivalent;
    }

    if (*res) {
        report.command = "resolution-study";
        BuiltinParams p = res_params;
        auto rows = resolution_study(
            [&](int n) {
                BuiltinParams q = p;
                q.n = n;
                return build_builtin(q);
            },
            res_ns, agg_tol);
        if (res_format == "csv") {
            std::cout << "n,atom_count,min_pairwise_hs_dist\n";
            for (const auto& r : rows)
                std::cout << r.n << ',' << r.atom_count << ','
                          << Json(r.min_pairwise_dist).dump() << '\n';
        } else {
            Json out = Json::array();
            for (const auto& r : rows)
                out.push_back({{"n", r.n},
                               {"atom_count", r.atom_count},
                               {"min_pairwise_hs_dist", r.min_pairwise_dist}});
            std::cout << out.dump(2) << '\n';
        }
        report.emit();
        return kExitOk;
    }

    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const corrgeo::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const corrgeo::InvalidArgs& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const corrgeo::Undersampled& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << e.what() << '\n';
        return kExitNoInput;
    } catch (const corrgeo::Error& e) {
        std::cerr << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
