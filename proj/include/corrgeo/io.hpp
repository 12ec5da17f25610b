#pragma once

// JSON schemas: model files (consumed by the CLI), geometry exports,
// and verdict serialization. Complex numbers are 2-arrays [re, im].

#include <json.hpp>

#include <fstream>
#include <string>

#include "corrgeo/correlation.hpp"
#include "corrgeo/equivalence.hpp"
#include "corrgeo/model.hpp"

namespace corrgeo {

using Json = nlohmann::ordered_json;

namespace io_detail {

inline Json complex_to_json(const Complex& z) {
    return Json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("complex numbers must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const MatrixC& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(complex_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline MatrixC matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty())
        throw ParseError("matrix must be a nonempty array of rows");
    const size_t rows = j.size();
    const size_t cols = j[0].size();
    MatrixC m(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols)
            throw ParseError("ragged matrix rows");
        for (size_t c = 0; c < cols; ++c)
            m(i, c) = complex_from_json(j[i][c]);
    }
    return m;
}

} // namespace io_detail

// ---------------------------------------------------------------------------
// Geometry files: {f, p, q, atoms: [{weight, matrix}], agg_tol}

inline Json geometry_to_json(const CorrelationGeometry& g) {
    Json j;
    j["f"] = g.f;
    j["p"] = g.bound.p;
    j["q"] = g.bound.q;
    j["agg_tol"] = g.measure.agg_tol;
    Json atoms = Json::array();
    for (const auto& a : g.measure.atoms) {
        Json atom;
        atom["weight"] = a.weight;
        atom["matrix"] = io_detail::matrix_to_json(a.op.entries());
        atoms.push_back(atom);
    }
    j["atoms"] = atoms;
    return j;
}

inline CorrelationGeometry geometry_from_json(const Json& j) {
    CorrelationGeometry g;
    try {
        g.f = j.at("f").get<int>();
        g.bound.p = j.at("p").get<int>();
        g.bound.q = j.at("q").get<int>();
        g.measure.agg_tol = j.at("agg_tol").get<double>();
        for (const auto& atom : j.at("atoms")) {
            MatrixC m = io_detail::matrix_from_json(atom.at("matrix"));
            if (m.rows() != g.f)
                throw ParseError("atom dimension does not match f");
            g.measure.atoms.push_back(
                {HermitianOperator(m), atom.at("weight").get<double>()});
        }
    } catch (const Json::exception& e) {
        throw ParseError(std::string("geometry: ") + e.what());
    }
    return g;
}

// ---------------------------------------------------------------------------
// Verdicts: {verdict, residual, certificate?, witness?, pairing?}

inline Json verdict_to_json(const EquivalenceVerdict& v) {
    Json j;
    switch (v.kind) {
    case EquivalenceVerdict::Kind::Equivalent:
        j["verdict"] = "equivalent";
        j["residual"] = v.residual;
        j["weight_mismatch"] = v.weight_mismatch;
        j["witness"] = io_detail::matrix_to_json(v.witness);
        j["pairing"] = v.pairing;
        break;
    case EquivalenceVerdict::Kind::Inequivalent:
        j["verdict"] = "inequivalent";
        if (v.certificate) {
            j["certificate"] = {{"invariant", v.certificate->invariant},
                                {"value1", v.certificate->value1},
                                {"value2", v.certificate->value2}};
        }
        break;
    case EquivalenceVerdict::Kind::Inconclusive:
        j["verdict"] = "inconclusive";
        j["reason"] = v.reason;
        break;
    }
    return j;
}

inline MatrixC unitary_from_verdict_json(const Json& j) {
    if (j.value("verdict", "") != "equivalent" || !j.contains("witness"))
        throw ParseError("verdict file carries no witness");
    return io_detail::matrix_from_json(j["witness"]);
}

// ---------------------------------------------------------------------------
// Model files

inline ScalarProductSpec scalar_product_from_json(const Json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "l2")
            return ScalarProductSpec::l2();
        if (s == "sobolev_h1")
            return ScalarProductSpec::sobolev_h1();
        throw ParseError("unknown scalar_product: " + s);
    }
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "sobolev_hk")
        return ScalarProductSpec::sobolev_hk(
            j.at("k").get<int>(), j.at("weights").get<std::vector<double>>());
    if (kind == "weighted_custom")
        return ScalarProductSpec::weighted_custom(j.at("kernel").get<std::string>());
    throw ParseError("unknown scalar_product kind: " + kind);
}

inline LocalFormSpec::Kind local_form_kind_from_string(const std::string& s) {
    if (s == "metric_on_fiber")
        return LocalFormSpec::Kind::MetricOnFiber;
    if (s == "gradient")
        return LocalFormSpec::Kind::GradientForm;
    if (s == "pointwise")
        return LocalFormSpec::Kind::PointwiseSesquilinear;
    throw ParseError("unknown local_form: " + s);
}

inline LocalFormSpec local_form_from_json(const Json& j) {
    if (j.is_string())
        return {local_form_kind_from_string(j.get<std::string>())};
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "epsilon_averaged")
        return LocalFormSpec::epsilon_averaged(
            local_form_kind_from_string(j.at("inner").get<std::string>()),
            j.at("epsilon").get<double>());
    return {local_form_kind_from_string(kind)};
}

inline EffectiveModel model_from_json(const Json& j) {
    EffectiveModel m;
    try {
        const Json& man = j.at("manifold");
        for (const auto& p : man.at("points")) {
            VectorR c(p.size());
            for (size_t i = 0; i < p.size(); ++i)
                c(i) = p[i].get<double>();
            m.manifold.coords.push_back(c);
        }
        const auto w = man.at("weights").get<std::vector<double>>();
        m.manifold.weights = Eigen::Map<const VectorR>(w.data(), w.size());
        const int n = m.manifold.n_points();
        const int d = m.manifold.dim();
        if (man.contains("metric")) {
            for (const auto& g : man["metric"]) {
                MatrixR gm(d, d);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        gm(r, c) = g.at(r).at(c).get<double>();
                m.manifold.metric.push_back(gm);
            }
        }
        if (man.contains("neighbors")) {
            for (const auto& nl : man["neighbors"]) {
                std::vector<std::pair<int, double>> lst;
                for (const auto& e : nl)
                    lst.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
                m.manifold.neighbors.push_back(lst);
            }
        }
        for (const auto& fj : j.at("fields")) {
            ReferenceField f;
            f.label = fj.value("label", "");
            f.fiber_dim = fj.at("fiber_dim").get<int>();
            f.vector_fiber = fj.value("vector_fiber", false);
            for (const auto& pv : fj.at("values")) {
                VectorC v(f.fiber_dim);
                for (int c = 0; c < f.fiber_dim; ++c)
                    v(c) = io_detail::complex_from_json(pv.at(c));
                f.values.push_back(v);
            }
            if (static_cast<int>(f.values.size()) != n)
                throw ParseError("field values must cover every point");
            if (fj.contains("jet")) {
                for (const auto& pj : fj["jet"]) {
                    MatrixC jet(d, f.fiber_dim);
                    for (int r = 0; r < d; ++r)
                        for (int c = 0; c < f.fiber_dim; ++c)
                            jet(r, c) = io_detail::complex_from_json(pj.at(r).at(c));
                    f.jets.push_back(jet);
                }
            }
            m.system.fields.push_back(std::move(f));
        }
        if (j.contains("descriptors")) {
            const Json& desc = j["descriptors"];
            if (desc.contains("A")) {
                for (const auto& a : desc["A"]) {
                    VectorR v(d);
                    for (int c = 0; c < d; ++c)
                        v(c) = a.at(c).get<double>();
                    m.potential_A.push_back(v);
                }
            }
            if (desc.contains("chi")) {
                const auto chi = desc["chi"].get<std::vector<double>>();
                m.scalar_chi = Eigen::Map<const VectorR>(chi.data(), chi.size());
            }
            m.mass = desc.value("mass", 0.0);
            m.charge = desc.value("charge", 0.0);
        }
        m.scalar_product = scalar_product_from_json(j.at("scalar_product"));
        m.local_form = local_form_from_json(j.at("local_form"));
        m.manifold.validate();
    } catch (const Json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------
// File helpers

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::ios_base::failure("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out)
        throw std::ios_base::failure("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace corrgeo
