#pragma once

// The local correlation map: Gram matrices from scalar-product specs,
// whitening onto an orthonormal Hilbert basis, per-point Hermitian form
// evaluation, and aggregation into the pushforward measure.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "corrgeo/model.hpp"
#include "corrgeo/operator_space.hpp"

namespace corrgeo {

struct GramMatrix {
    MatrixC g;          // m x m Hermitian PSD
    int rank = 0;       // f_eff at the relative cut
    MatrixC whitening;  // f_eff x m, W G W^* = I
};

namespace detail {

inline MatrixR point_metric(const EffectiveModel& model, int k) {
    if (model.manifold.has_metric())
        return model.manifold.metric[k];
    int d = model.manifold.dim();
    return MatrixR::Identity(d, d);
}

// Fiber pairing <v_i, v_j> (conjugate-linear in the first slot).
inline Complex fiber_inner(const VectorC& a, const VectorC& b) {
    return a.dot(b); // Eigen's dot conjugates the first argument
}

inline Complex metric_fiber_inner(const MatrixR& g, const VectorC& a,
                                  const VectorC& b) {
    return (a.adjoint() * g.cast<Complex>() * b)(0, 0);
}

// Metric-contracted pairing of first-derivative jets (covector slots use
// the inverse metric).
inline Complex jet_inner(const MatrixR& g, const MatrixC& ja, const MatrixC& jb) {
    MatrixR ginv = g.inverse();
    return (ja.adjoint() * ginv.cast<Complex>() * jb).trace();
}

} // namespace detail

// Scalar-product integrand at one point for a pair of fields.
inline Complex scalar_product_integrand(const EffectiveModel& model, int k,
                                        const ReferenceField& fi,
                                        const ReferenceField& fj) {
    const auto& spec = model.scalar_product;
    switch (spec.kind) {
    case ScalarProductSpec::Kind::L2:
        return detail::fiber_inner(fi.values[k], fj.values[k]);
    case ScalarProductSpec::Kind::SobolevH1: {
        if (!fi.has_jet() || !fj.has_jet())
            throw MissingJet("Sobolev H1 scalar product needs jets");
        MatrixR g = detail::point_metric(model, k);
        return detail::fiber_inner(fi.values[k], fj.values[k]) +
               detail::jet_inner(g, fi.jets[k], fj.jets[k]);
    }
    case ScalarProductSpec::Kind::SobolevHk: {
        if (spec.k > 1)
            throw Unsupported("Sobolev H^k with k > 1 needs higher jets");
        if (spec.order_weights.size() < 2)
            throw InvalidArgs("Sobolev H^k needs weights for orders 0..1");
        if (!fi.has_jet() || !fj.has_jet())
            throw MissingJet("Sobolev H^k scalar product needs jets");
        MatrixR g = detail::point_metric(model, k);
        return spec.order_weights[0] *
                   detail::fiber_inner(fi.values[k], fj.values[k]) +
               spec.order_weights[1] *
                   detail::jet_inner(g, fi.jets[k], fj.jets[k]);
    }
    case ScalarProductSpec::Kind::WeightedCustom: {
        if (spec.kernel_id == "metric_fiber")
            return detail::metric_fiber_inner(detail::point_metric(model, k),
                                              fi.values[k], fj.values[k]);
        throw UnknownKernel(spec.kernel_id);
    }
    }
    throw InvalidArgs("unknown scalar product kind");
}

// G_ij = sum_k w_k * integrand(psi_i, psi_j at k), whitened by spectral
// decomposition with rank cut at 1e-10 * lambda_max. Degenerate systems
// proceed on the quotient (f_eff = rank < m).
inline GramMatrix gram(const EffectiveModel& model) {
    const int m = model.system.size();
    const int n = model.manifold.n_points();
    if (m < 1)
        throw InvalidArgs("empty reference system");
    MatrixC g = MatrixC::Zero(m, m);
    for (int k = 0; k < n; ++k) {
        double w = model.manifold.weights(k);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                g(i, j) += w * scalar_product_integrand(
                                   model, k, model.system.fields[i],
                                   model.system.fields[j]);
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
            g(i, j) = std::conj(g(j, i));
    g = 0.5 * (g + g.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<MatrixC> es(g);
    if (es.info() != Eigen::Success)
        throw NumericalFailure("gram eigendecomposition failed");
    const VectorR& lam = es.eigenvalues(); // ascending
    double lmax = lam(m - 1);
    if (!(lmax > 0))
        throw DegenerateSystem("gram matrix has no positive spectrum");
    double cut = 1e-10 * lmax;
    int rank = 0;
    for (int i = 0; i < m; ++i)
        if (lam(i) > cut)
            ++rank;
    GramMatrix out;
    out.g = g;
    out.rank = rank;
    out.whitening = MatrixC(rank, m);
    // Keep descending eigenvalue order for a deterministic basis.
    for (int r = 0; r < rank; ++r) {
        int src = m - 1 - r;
        out.whitening.row(r) =
            es.eigenvectors().col(src).adjoint() / std::sqrt(lam(src));
    }
    return out;
}

// Cross Gram C_ij = <phi^A_i, phi^B_j> under A's scalar product. Both
// models must share the manifold sampling. Used to express a
// Hilbert-space intertwiner in whitened coordinates.
inline MatrixC cross_gram(const EffectiveModel& a, const EffectiveModel& b) {
    if (a.manifold.n_points() != b.manifold.n_points())
        throw DimMismatch("cross_gram needs a shared manifold sampling");
    const int ma = a.system.size(), mb = b.system.size();
    const int n = a.manifold.n_points();
    MatrixC c = MatrixC::Zero(ma, mb);
    for (int k = 0; k < n; ++k) {
        double w = a.manifold.weights(k);
        for (int i = 0; i < ma; ++i)
            for (int j = 0; j < mb; ++j)
                c(i, j) += w * scalar_product_integrand(
                                   a, k, a.system.fields[i], b.system.fields[j]);
    }
    return c;
}

// B_ij = b_x(psi_i(x), psi_j(x)) for the requested form variant.
inline MatrixC local_form_matrix(const EffectiveModel& model, int point_index,
                                 const LocalFormSpec& spec) {
    const int m = model.system.size();
    auto eval_inner = [&](LocalFormSpec::Kind kind, int k) {
        MatrixC b(m, m);
        MatrixR g = detail::point_metric(model, k);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const auto& fi = model.system.fields[i];
                const auto& fj = model.system.fields[j];
                switch (kind) {
                case LocalFormSpec::Kind::MetricOnFiber:
                    b(i, j) = detail::metric_fiber_inner(g, fi.values[k],
                                                         fj.values[k]);
                    break;
                case LocalFormSpec::Kind::GradientForm:
                    if (!fi.has_jet() || !fj.has_jet())
                        throw MissingJet("gradient form needs jets");
                    b(i, j) = detail::jet_inner(g, fi.jets[k], fj.jets[k]);
                    break;
                case LocalFormSpec::Kind::PointwiseSesquilinear:
                    b(i, j) = detail::fiber_inner(fi.values[k], fj.values[k]);
                    break;
                default:
                    throw InvalidArgs("bad inner form kind");
                }
            }
        return b;
    };

    if (spec.kind != LocalFormSpec::Kind::EpsilonAveraged)
        return eval_inner(spec.kind, point_index);

    if (!model.manifold.has_neighbors())
        throw EmptyBall("epsilon averaging needs neighbor lists");
    MatrixC acc = model.manifold.weights(point_index) *
                  eval_inner(spec.inner, point_index);
    double wsum = model.manifold.weights(point_index);
    for (auto [idx, dist] : model.manifold.neighbors[point_index])
        if (dist < spec.epsilon) {
            acc += model.manifold.weights(idx) * eval_inner(spec.inner, idx);
            wsum += model.manifold.weights(idx);
        }
    return acc / wsum;
}

// F(x) = W B_x W^* on the whitened Hilbert basis.
inline HermitianOperator local_correlation(const EffectiveModel& model,
                                           const GramMatrix& gm,
                                           int point_index) {
    MatrixC b = local_form_matrix(model, point_index, model.local_form);
    return HermitianOperator(gm.whitening * b * gm.whitening.adjoint());
}

inline HermitianOperator local_correlation(const EffectiveModel& model,
                                           int point_index) {
    return local_correlation(model, gram(model), point_index);
}

struct Atom {
    HermitianOperator op;
    double weight;
};

struct CorrelationMeasure {
    std::vector<Atom> atoms;
    double agg_tol = 0.0;

    double total_mass() const {
        double s = 0;
        for (const auto& a : atoms)
            s += a.weight;
        return s;
    }
};

struct CorrelationGeometry {
    int f = 0;
    SignatureBound bound;
    CorrelationMeasure measure;
};

inline SignatureBound bound_from_atoms(const std::vector<Atom>& atoms,
                                       double tol = 1e-9) {
    SignatureBound b{0, 0};
    for (const auto& a : atoms) {
        Signature s = signature(a.op, tol);
        b.p = std::max(b.p, s.n_pos);
        b.q = std::max(b.q, s.n_neg);
    }
    return b;
}

// Deterministic greedy aggregation in input order: an operator joins the
// nearest existing cluster whose running mean lies within
// agg_tol * max(1, ||F||_HS), else starts a new cluster. Cluster
// representative is the weight-averaged mean, re-symmetrized.
inline std::vector<Atom> aggregate_operators(
    const std::vector<std::pair<MatrixC, double>>& ops, double agg_tol) {
    struct Cluster {
        MatrixC weighted_sum;
        double weight;
    };
    std::vector<Cluster> clusters;
    for (const auto& [f, w] : ops) {
        if (!(w > 0))
            continue;
        double thresh = agg_tol * std::max(1.0, f.norm());
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < clusters.size(); ++c) {
            MatrixC mean = clusters[c].weighted_sum / clusters[c].weight;
            double d = (mean - f).norm();
            if (d <= thresh && d < best_d) {
                best = static_cast<int>(c);
                best_d = d;
            }
        }
        if (best >= 0) {
            clusters[best].weighted_sum += w * f;
            clusters[best].weight += w;
        } else {
            clusters.push_back({w * f, w});
        }
    }
    std::vector<Atom> atoms;
    atoms.reserve(clusters.size());
    for (const auto& c : clusters)
        atoms.push_back({HermitianOperator(c.weighted_sum / c.weight), c.weight});
    return atoms;
}

// The discrete pushforward measure of the manifold volume through the
// local correlation map.
inline CorrelationGeometry pushforward(const EffectiveModel& model,
                                       double agg_tol) {
    if (agg_tol < 0)
        throw InvalidArgs("agg_tol must be nonnegative");
    model.manifold.validate();
    GramMatrix gm = gram(model);
    const int n = model.manifold.n_points();
    std::vector<std::pair<MatrixC, double>> ops;
    ops.reserve(n);
    for (int k = 0; k < n; ++k)
        ops.emplace_back(local_correlation(model, gm, k).entries(),
                         model.manifold.weights(k));
    CorrelationGeometry geom;
    geom.f = gm.rank;
    geom.measure.atoms = aggregate_operators(ops, agg_tol);
    geom.measure.agg_tol = agg_tol;
    geom.bound = bound_from_atoms(geom.measure.atoms);
    return geom;
}

struct RegularityReport {
    double regular_mass_fraction = 0.0;
    int atom_count = 0;
    // (n_pos, n_neg, n_zero) -> accumulated mass
    std::map<std::tuple<int, int, int>, double> signature_histogram;
};

inline RegularityReport regularity_report(const CorrelationGeometry& geom,
                                          double tol = 1e-9) {
    RegularityReport rep;
    rep.atom_count = static_cast<int>(geom.measure.atoms.size());
    double total = geom.measure.total_mass();
    double regular = 0;
    for (const auto& a : geom.measure.atoms) {
        Signature s = signature(a.op, tol);
        rep.signature_histogram[{s.n_pos, s.n_neg, s.n_zero}] += a.weight;
        if (s.n_pos == geom.bound.p && s.n_neg == geom.bound.q)
            regular += a.weight;
    }
    rep.regular_mass_fraction = total > 0 ? regular / total : 0.0;
    return rep;
}

struct ResolutionRow {
    int n = 0;
    int atom_count = 0;
    double min_pairwise_dist = 0.0;
};

// How point-distinguishability grows with the sampling resolution.
inline std::vector<ResolutionRow> resolution_study(
    const std::function<EffectiveModel(int)>& family, const std::vector<int>& ns,
    double agg_tol) {
    std::vector<ResolutionRow> rows;
    for (int n : ns) {
        CorrelationGeometry geom = pushforward(family(n), agg_tol);
        ResolutionRow row;
        row.n = n;
        row.atom_count = static_cast<int>(geom.measure.atoms.size());
        double mind = std::numeric_limits<double>::infinity();
        const auto& atoms = geom.measure.atoms;
        for (size_t i = 0; i < atoms.size(); ++i)
            for (size_t j = i + 1; j < atoms.size(); ++j)
                mind = std::min(mind, hs_dist(atoms[i].op, atoms[j].op));
        row.min_pairwise_dist = atoms.size() > 1 ? mind : 0.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace corrgeo
