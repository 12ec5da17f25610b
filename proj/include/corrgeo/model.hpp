#pragma once

// Discrete effective physical models: sampled manifolds with volume
// weights and descriptors, reference field systems with optional
// first-order jets, and the built-in generators.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corrgeo/errors.hpp"
#include "corrgeo/forms.hpp"
#include "corrgeo/operator_space.hpp"

namespace corrgeo {

struct DiscreteManifold {
    // One entry per sample point.
    std::vector<VectorR> coords;
    VectorR weights;
    // Optional structures; empty when absent.
    std::vector<MatrixR> metric;                             // per-point d x d, SPD
    std::vector<std::vector<std::pair<int, double>>> neighbors; // (index, distance)

    int dim() const { return coords.empty() ? 0 : static_cast<int>(coords[0].size()); }
    int n_points() const { return static_cast<int>(coords.size()); }
    bool has_metric() const { return !metric.empty(); }
    bool has_neighbors() const { return !neighbors.empty(); }
    double total_volume() const { return weights.sum(); }

    void validate() const {
        if (coords.size() != static_cast<size_t>(weights.size()))
            throw InvalidArgs("manifold: coords/weights size mismatch");
        for (Eigen::Index k = 0; k < weights.size(); ++k)
            if (!(weights(k) > 0))
                throw InvalidArgs("manifold: weights must be positive");
        if (has_metric() && metric.size() != coords.size())
            throw InvalidArgs("manifold: metric must cover every point");
    }
};

struct ReferenceField {
    std::string label;
    int fiber_dim = 1;
    // true when the fiber is the tangent space (transforms under diffeos)
    bool vector_fiber = false;
    std::vector<VectorC> values;            // per point, size fiber_dim
    std::vector<MatrixC> jets;              // per point, d_man x fiber_dim; empty if absent

    bool has_jet() const { return !jets.empty(); }
};

struct ReferenceSystem {
    std::vector<ReferenceField> fields;

    int size() const { return static_cast<int>(fields.size()); }
    int fiber_dim() const { return fields.empty() ? 0 : fields[0].fiber_dim; }
    bool has_jets() const {
        return !fields.empty() &&
               std::all_of(fields.begin(), fields.end(),
                           [](const ReferenceField& f) { return f.has_jet(); });
    }
};

struct EffectiveModel {
    DiscreteManifold manifold;
    ReferenceSystem system;
    std::vector<VectorR> potential_A;       // per point, d_man; empty if absent
    VectorR scalar_chi;                     // per point; empty if absent
    double mass = 0.0;
    double charge = 0.0;
    ScalarProductSpec scalar_product;
    LocalFormSpec local_form;

    // Generator provenance; used by induced-symmetry construction.
    std::string family;
    int family_n = 0;
    int family_kmax = 0;
    std::vector<int> diffeo_perm;           // set by apply_diffeo

    bool has_potential() const { return !potential_A.empty(); }
    bool has_chi() const { return scalar_chi.size() > 0; }
};

struct LatticeDiracModel {
    int sites = 0;
    double spacing = 1.0;
    double mass = 0.0;
    double charge = 1.0;
    VectorR potential;                      // A_j per site; empty means zero

    void validate() const {
        if (sites < 4 || sites % 2 != 0)
            throw InvalidArgs("lattice: need even sites >= 4");
        if (!(spacing > 0))
            throw InvalidArgs("lattice: spacing must be positive");
        if (potential.size() != 0 && potential.size() != sites)
            throw InvalidArgs("lattice: potential size mismatch");
    }
};

// A gauge function chi together with its analytic chart derivatives.
struct GaugeFunction {
    VectorR values;                         // per point
    std::vector<VectorR> jets;              // per point, d_man; empty if unavailable

    bool has_jets() const { return !jets.empty(); }
};

// ---------------------------------------------------------------------------
// Generators

// Unit circle sampled at N points with plane-wave reference fields
// e^{i k theta}, k = -k_max..k_max, analytic jets, pointwise sesquilinear
// local form and L2 scalar product.
inline EffectiveModel circle_plane_waves(int n, int k_max) {
    if (k_max < 0)
        throw InvalidArgs("k_max must be nonnegative");
    if (n <= 2 * k_max + 1)
        throw Undersampled("circle_plane_waves: need N > 2*k_max+1");
    const double two_pi = 2.0 * std::numbers::pi;
    EffectiveModel m;
    m.manifold.coords.resize(n);
    m.manifold.weights = VectorR::Constant(n, two_pi / n);
    m.manifold.metric.assign(n, MatrixR::Identity(1, 1));
    for (int j = 0; j < n; ++j)
        m.manifold.coords[j] = VectorR::Constant(1, two_pi * j / n);
    for (int k = -k_max; k <= k_max; ++k) {
        ReferenceField f;
        f.label = "k=" + std::to_string(k);
        f.fiber_dim = 1;
        f.values.resize(n);
        f.jets.resize(n);
        for (int j = 0; j < n; ++j) {
            double theta = two_pi * j / n;
            Complex v = std::exp(Complex(0, k * theta));
            f.values[j] = VectorC::Constant(1, v);
            f.jets[j] = MatrixC::Constant(1, 1, Complex(0, k) * v);
        }
        m.system.fields.push_back(std::move(f));
    }
    m.scalar_product = ScalarProductSpec::l2();
    m.local_form = LocalFormSpec::pointwise();
    m.family = "circle-plane-waves";
    m.family_n = n;
    m.family_kmax = k_max;
    return m;
}

// Flat unit-volume 2-torus with the two coordinate frame fields; local
// form is the metric on the fiber and the scalar product the
// metric-contracted L2 pairing.
inline EffectiveModel torus_tetrads(int n_per_dim) {
    if (n_per_dim < 2)
        throw InvalidArgs("torus_tetrads: need n_per_dim >= 2");
    const int n = n_per_dim * n_per_dim;
    EffectiveModel m;
    m.manifold.coords.resize(n);
    m.manifold.weights = VectorR::Constant(n, 1.0 / n);
    m.manifold.metric.assign(n, MatrixR::Identity(2, 2));
    for (int i = 0; i < n_per_dim; ++i)
        for (int j = 0; j < n_per_dim; ++j) {
            VectorR c(2);
            c << static_cast<double>(i) / n_per_dim,
                 static_cast<double>(j) / n_per_dim;
            m.manifold.coords[i * n_per_dim + j] = c;
        }
    for (int a = 0; a < 2; ++a) {
        ReferenceField f;
        f.label = a == 0 ? "e_x" : "e_y";
        f.fiber_dim = 2;
        f.vector_fiber = true;
        VectorC v = VectorC::Zero(2);
        v(a) = 1.0;
        f.values.assign(n, v);
        f.jets.assign(n, MatrixC::Zero(2, 2));
        m.system.fields.push_back(std::move(f));
    }
    m.scalar_product = ScalarProductSpec::weighted_custom("metric_fiber");
    m.local_form = LocalFormSpec::metric_on_fiber();
    m.family = "torus-tetrads";
    m.family_n = n_per_dim;
    return m;
}

// Unit circle with the real pair {cos, sin}, gradient local form and
// Sobolev H1 scalar product.
inline EffectiveModel circle_trig_pair(int n) {
    if (n < 8)
        throw InvalidArgs("circle_trig_pair: need N >= 8");
    const double two_pi = 2.0 * std::numbers::pi;
    EffectiveModel m;
    m.manifold.coords.resize(n);
    m.manifold.weights = VectorR::Constant(n, two_pi / n);
    m.manifold.metric.assign(n, MatrixR::Identity(1, 1));
    for (int j = 0; j < n; ++j)
        m.manifold.coords[j] = VectorR::Constant(1, two_pi * j / n);
    for (int a = 0; a < 2; ++a) {
        ReferenceField f;
        f.label = a == 0 ? "cos" : "sin";
        f.fiber_dim = 1;
        f.values.resize(n);
        f.jets.resize(n);
        for (int j = 0; j < n; ++j) {
            double theta = two_pi * j / n;
            double v = a == 0 ? std::cos(theta) : std::sin(theta);
            double dv = a == 0 ? -std::sin(theta) : std::cos(theta);
            f.values[j] = VectorC::Constant(1, Complex(v, 0));
            f.jets[j] = MatrixC::Constant(1, 1, Complex(dv, 0));
        }
        m.system.fields.push_back(std::move(f));
    }
    m.scalar_product = ScalarProductSpec::sobolev_h1();
    m.local_form = LocalFormSpec::gradient_form();
    m.family = "circle-trig-pair";
    m.family_n = n;
    return m;
}

// One-particle Hamiltonian of the 1-D staggered-free lattice Dirac
// model. Site-major ordering, 2-spinor per site:
//   H = sigma_1 (x) K + m sigma_3 (x) I
// with K the central difference -i/(2a) carrying link phases
// U_j = exp(-i q a A_j) on the hop j -> j+1 (periodic).
inline MatrixC lattice_dirac_hamiltonian(const LatticeDiracModel& lat) {
    lat.validate();
    const int n = lat.sites;
    const double a = lat.spacing;
    // link phase matching the covariant derivative D = grad + i q A, so
    // psi -> e^{-i q chi} psi together with A -> A + grad chi conjugates
    // the hamiltonian by the same diagonal phase
    auto link = [&](int j) {
        double aj = lat.potential.size() ? lat.potential(j) : 0.0;
        return std::exp(Complex(0, lat.charge * a * aj));
    };
    MatrixC k_site = MatrixC::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        int jp = (j + 1) % n;
        Complex hop = Complex(0, -1.0 / (2 * a)) * link(j);
        k_site(j, jp) += hop;
        k_site(jp, j) += std::conj(hop);
    }
    MatrixC h = MatrixC::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) {
            Complex k = k_site(j, jp);
            if (k != Complex(0, 0)) {
                // sigma_1 on the spinor index
                h(2 * j, 2 * jp + 1) += k;
                h(2 * j + 1, 2 * jp) += k;
            }
        }
    for (int j = 0; j < n; ++j) {
        h(2 * j, 2 * j) += lat.mass;
        h(2 * j + 1, 2 * j + 1) -= lat.mass;
    }
    return h;
}

// Reference system from the lowest-eigenvalue eigenspace of the lattice
// Dirac Hamiltonian (the discrete stand-in for the negative-energy sea).
inline EffectiveModel lattice_dirac_sea(const LatticeDiracModel& lat, int m_fields) {
    lat.validate();
    const int n = lat.sites;
    if (m_fields < 1 || m_fields > 2 * n)
        throw InvalidArgs("lattice_dirac_sea: m_fields out of range");
    MatrixC h = lattice_dirac_hamiltonian(lat);
    Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
    if (es.info() != Eigen::Success)
        throw NumericalFailure("lattice Dirac eigensolve failed");
    const VectorR& ev = es.eigenvalues(); // ascending
    if (m_fields < 2 * n &&
        std::abs(ev(m_fields) - ev(m_fields - 1)) <= 1e-10)
        throw AmbiguousSeaCut("degenerate eigenvalues at the sea cut; change m_fields");

    const double a = lat.spacing;
    EffectiveModel m;
    m.manifold.coords.resize(n);
    m.manifold.weights = VectorR::Constant(n, a);
    m.manifold.metric.assign(n, MatrixR::Identity(1, 1));
    for (int j = 0; j < n; ++j)
        m.manifold.coords[j] = VectorR::Constant(1, a * j);
    const double scale = 1.0 / std::sqrt(a); // lattice-L2 orthonormal
    for (int i = 0; i < m_fields; ++i) {
        ReferenceField f;
        f.label = "sea_" + std::to_string(i);
        f.fiber_dim = 2;
        f.values.resize(n);
        for (int j = 0; j < n; ++j) {
            VectorC v(2);
            v << es.eigenvectors()(2 * j, i), es.eigenvectors()(2 * j + 1, i);
            f.values[j] = scale * v;
        }
        m.system.fields.push_back(std::move(f));
    }
    m.mass = lat.mass;
    m.charge = lat.charge;
    if (lat.potential.size()) {
        m.potential_A.resize(n);
        for (int j = 0; j < n; ++j)
            m.potential_A[j] = VectorR::Constant(1, lat.potential(j));
    }
    m.scalar_product = ScalarProductSpec::l2();
    m.local_form = LocalFormSpec::pointwise();
    m.family = "lattice-dirac-sea";
    m.family_n = n;
    return m;
}

// ---------------------------------------------------------------------------
// Gauge and diffeomorphism transformations

// psi -> e^{-i q chi} psi, jets co-transformed, A -> A + d chi.
inline EffectiveModel apply_gauge_phase(const EffectiveModel& model,
                                        const GaugeFunction& chi, double q) {
    const int n = model.manifold.n_points();
    if (chi.values.size() != n)
        throw InvalidArgs("gauge: chi must be defined at every point");
    if (model.system.has_jets() && !chi.has_jets())
        throw MissingJet("gauge: fields carry jets, so chi needs jets too");

    EffectiveModel out = model;
    for (auto& f : out.system.fields) {
        for (int k = 0; k < n; ++k) {
            Complex phase = std::exp(Complex(0, -q * chi.values(k)));
            if (f.has_jet()) {
                // grad(e^{-iq chi} psi) = e^{-iq chi} (grad psi - i q (grad chi) psi)
                f.jets[k] = phase * (f.jets[k] -
                            Complex(0, q) * (chi.jets[k].cast<Complex>() *
                                             f.values[k].transpose()));
            }
            f.values[k] = phase * f.values[k];
        }
    }
    if (chi.has_jets()) {
        if (out.potential_A.empty())
            out.potential_A.assign(n, VectorR::Zero(model.manifold.dim()));
        for (int k = 0; k < n; ++k)
            out.potential_A[k] += chi.jets[k];
    }
    if (out.scalar_chi.size() == 0)
        out.scalar_chi = chi.values;
    else
        out.scalar_chi += chi.values;
    return out;
}

// Pull an effective model back along a sampled diffeomorphism h, given
// as a point bijection (target index k maps to source index perm[k])
// and the Jacobian of h at each target point.
inline EffectiveModel apply_diffeo(const EffectiveModel& model,
                                   const std::vector<int>& perm,
                                   const std::vector<MatrixR>& jacobians) {
    const int n = model.manifold.n_points();
    const int d = model.manifold.dim();
    if (static_cast<int>(perm.size()) != n ||
        static_cast<int>(jacobians.size()) != n)
        throw InvalidDiffeo("perm/jacobians must cover every point");
    std::vector<int> seen(n, 0), inv(n, -1);
    for (int k = 0; k < n; ++k) {
        if (perm[k] < 0 || perm[k] >= n || seen[perm[k]]++)
            throw InvalidDiffeo("perm is not a bijection");
        inv[perm[k]] = k;
    }
    for (const auto& j : jacobians)
        if (j.rows() != d || j.cols() != d ||
            std::abs(j.determinant()) < 1e-12)
            throw InvalidDiffeo("jacobians must be invertible d x d");

    EffectiveModel out = model;
    out.diffeo_perm = perm;
    for (int k = 0; k < n; ++k) {
        const int s = perm[k];
        const MatrixR& j = jacobians[k];
        MatrixR jinv = j.inverse();
        out.manifold.weights(k) = model.manifold.weights(s);
        if (model.manifold.has_metric())
            out.manifold.metric[k] =
                j.transpose() * model.manifold.metric[s] * j;
        if (model.manifold.has_neighbors()) {
            out.manifold.neighbors[k].clear();
            for (auto [idx, dist] : model.manifold.neighbors[s])
                out.manifold.neighbors[k].emplace_back(inv[idx], dist);
        }
        for (size_t fi = 0; fi < model.system.fields.size(); ++fi) {
            const auto& src = model.system.fields[fi];
            auto& dst = out.system.fields[fi];
            if (src.vector_fiber)
                dst.values[k] = jinv.cast<Complex>() * src.values[s];
            else
                dst.values[k] = src.values[s];
            if (src.has_jet()) {
                MatrixC jet = j.transpose().cast<Complex>() * src.jets[s];
                if (src.vector_fiber)
                    jet = jet * jinv.transpose().cast<Complex>();
                dst.jets[k] = jet;
            }
        }
        if (model.has_potential())
            out.potential_A[k] = j.transpose() * model.potential_A[s];
        if (model.has_chi())
            out.scalar_chi(k) = model.scalar_chi(s);
    }
    return out;
}

// Convenience: rotation of a circle-sampled model by s sites (Jacobian 1).
inline EffectiveModel rotate_circle(const EffectiveModel& model, int shift) {
    const int n = model.manifold.n_points();
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k)
        perm[k] = ((k + shift) % n + n) % n;
    std::vector<MatrixR> jac(n, MatrixR::Identity(1, 1));
    return apply_diffeo(model, perm, jac);
}

// Reflection theta -> -theta (Jacobian -1).
inline EffectiveModel reflect_circle(const EffectiveModel& model) {
    const int n = model.manifold.n_points();
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k)
        perm[k] = (n - k) % n;
    std::vector<MatrixR> jac(n, -MatrixR::Identity(1, 1));
    return apply_diffeo(model, perm, jac);
}

} // namespace corrgeo
