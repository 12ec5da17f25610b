#pragma once

// Convex combinations of correlation measures after embedding and
// optional unitary alignment, plus descriptive diagnostics.

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrgeo/correlation.hpp"
#include "corrgeo/equivalence.hpp"

namespace corrgeo {

struct MixSpec {
    double tau = 0.5;
    MatrixC aligner; // empty means identity

    bool has_aligner() const { return aligner.size() > 0; }
};

// tau * rho_2 + (1 - tau) * U rho_1 U^{-1}, re-aggregated at agg_tol.
// With agg_tol = 0 the result is the tagged union (g2 atoms first).
inline CorrelationGeometry mix(const CorrelationGeometry& g1,
                               const CorrelationGeometry& g2,
                               const MixSpec& spec, double agg_tol) {
    if (!(spec.tau >= 0.0 && spec.tau <= 1.0))
        throw InvalidArgs("tau must lie in [0,1]");
    const int f = std::max(g1.f, g2.f);
    CorrelationGeometry e1 = embed(g1, f);
    CorrelationGeometry e2 = embed(g2, f);
    MatrixC u = spec.has_aligner() ? spec.aligner : MatrixC::Identity(f, f);
    if (u.rows() != f || !is_unitary(u))
        throw NotUnitary("mix aligner must be unitary on the target space");

    std::vector<std::pair<MatrixC, double>> ops;
    for (const auto& a : e2.measure.atoms)
        if (spec.tau > 0)
            ops.emplace_back(a.op.entries(), spec.tau * a.weight);
    for (const auto& a : e1.measure.atoms)
        if (spec.tau < 1)
            ops.emplace_back(u * a.op.entries() * u.adjoint(),
                             (1.0 - spec.tau) * a.weight);
    CorrelationGeometry out;
    out.f = f;
    out.measure.atoms = aggregate_operators(ops, agg_tol);
    out.measure.agg_tol = agg_tol;
    out.bound = bound_from_atoms(out.measure.atoms);
    return out;
}

struct MixtureDiagnostics {
    int atom_count = 0;
    double regular_mass_fraction = 0.0;
    double spectral_spread = 0.0;   // weighted stddev of per-atom spectra
    double nearest_min = 0.0;       // nearest-atom hs distance stats
    double nearest_mean = 0.0;
    double nearest_max = 0.0;
};

inline MixtureDiagnostics mixture_diagnostics(const CorrelationGeometry& g) {
    MixtureDiagnostics d;
    const auto& atoms = g.measure.atoms;
    d.atom_count = static_cast<int>(atoms.size());
    d.regular_mass_fraction = regularity_report(g).regular_mass_fraction;
    if (atoms.empty())
        return d;

    double mass = g.measure.total_mass();
    VectorR mean = VectorR::Zero(g.f);
    for (const auto& a : atoms)
        mean += (a.weight / mass) * a.op.spectrum();
    double var = 0;
    for (const auto& a : atoms)
        var += (a.weight / mass) * (a.op.spectrum() - mean).squaredNorm();
    d.spectral_spread = std::sqrt(var);

    if (atoms.size() > 1) {
        double sum = 0;
        d.nearest_min = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < atoms.size(); ++i) {
            double nn = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < atoms.size(); ++j)
                if (j != i)
                    nn = std::min(nn, hs_dist(atoms[i].op, atoms[j].op));
            d.nearest_min = std::min(d.nearest_min, nn);
            d.nearest_max = std::max(d.nearest_max, nn);
            sum += nn;
        }
        d.nearest_mean = sum / static_cast<double>(atoms.size());
    }
    return d;
}

} // namespace corrgeo
