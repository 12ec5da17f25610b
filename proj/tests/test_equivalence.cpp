#include <doctest.h>

#include <corrgeo/equivalence.hpp>
#include <corrgeo/model.hpp>

#include <numbers>
#include <random>

using namespace corrgeo;

namespace {

MatrixC random_unitary(int f, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    MatrixC z(f, f);
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j)
            z(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<MatrixC> qr(z);
    MatrixC q = qr.householderQ();
    MatrixC r = q.adjoint() * z;
    for (int j = 0; j < f; ++j) {
        Complex d = r(j, j);
        if (std::abs(d) > 0)
            q.col(j) *= d / std::abs(d);
    }
    return q;
}

CorrelationGeometry random_geometry(int f, int n_atoms, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> wdist(0.2, 2.0);
    CorrelationGeometry geom;
    geom.f = f;
    geom.measure.agg_tol = 1e-8;
    for (int a = 0; a < n_atoms; ++a) {
        MatrixC z(f, f);
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < f; ++j)
                z(i, j) = Complex(g(rng), g(rng));
        geom.measure.atoms.push_back({HermitianOperator(z), wdist(rng)});
    }
    geom.bound = bound_from_atoms(geom.measure.atoms);
    return geom;
}

CorrelationGeometry conjugated(const CorrelationGeometry& g, const MatrixC& u) {
    CorrelationGeometry out = g;
    for (auto& a : out.measure.atoms)
        a.op = conjugate(u, a.op);
    return out;
}
} // namespace

TEST_CASE("embed pads with zeros and keeps spectra") {
    CorrelationGeometry g = random_geometry(3, 4, 0);
    CorrelationGeometry e = embed(g, 5);
    CHECK(e.f == 5);
    for (size_t i = 0; i < g.measure.atoms.size(); ++i) {
        const VectorR& s0 = g.measure.atoms[i].op.spectrum();
        const VectorR& s1 = e.measure.atoms[i].op.spectrum();
        // nonzero spectrum preserved modulo added zeros
        std::vector<double> a(s0.data(), s0.data() + s0.size());
        std::vector<double> b(s1.data(), s1.data() + s1.size());
        for (double z : {0.0, 0.0})
            a.push_back(z);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        for (size_t k = 0; k < a.size(); ++k)
            CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    }
    CHECK(embed(g, 3).f == 3);
    CHECK_THROWS_AS(embed(g, 2), InvalidEmbedding);
}

TEST_CASE("embedding a single positive atom") {
    CorrelationGeometry g;
    g.f = 1;
    g.measure.atoms.push_back({HermitianOperator(MatrixC::Identity(1, 1)), 1.0});
    g.bound = {1, 0};
    CorrelationGeometry e = embed(g, 3);
    VectorR s = e.measure.atoms[0].op.spectrum();
    CHECK(s(0) == doctest::Approx(1.0));
    CHECK(s(1) == doctest::Approx(0.0));
    CHECK(s(2) == doctest::Approx(0.0));
}

TEST_CASE("invariant profile is conjugation invariant") {
    CorrelationGeometry g = random_geometry(4, 5, 1);
    CorrelationGeometry c = conjugated(g, random_unitary(4, 2));
    InvariantProfile p1 = invariant_profile(g);
    InvariantProfile p2 = invariant_profile(c);
    CHECK(p1.total_mass == doctest::Approx(p2.total_mass));
    for (int r = 0; r < 4; ++r)
        CHECK(p1.power_sums[r] ==
              doctest::Approx(p2.power_sums[r]).epsilon(1e-10));
    CHECK_FALSE(profile_certificate(g, c, 1e-8).has_value());
}

TEST_CASE("scaled weights produce a mass certificate") {
    CorrelationGeometry g = random_geometry(4, 3, 3);
    CorrelationGeometry h = g;
    for (auto& a : h.measure.atoms)
        a.weight *= 2;
    auto cert = profile_certificate(g, h, 1e-8);
    REQUIRE(cert.has_value());
    CHECK(cert->invariant == "total_mass");
}

TEST_CASE("find_witness recovers a random conjugation") {
    for (unsigned seed = 0; seed < 10; ++seed) {
        CorrelationGeometry g = random_geometry(6, 8, 100 + seed);
        MatrixC u = random_unitary(6, 200 + seed);
        CorrelationGeometry c = conjugated(g, u);
        EquivalenceVerdict v = find_witness(g, c, 1e-8, seed);
        REQUIRE(v.equivalent());
        CHECK(v.residual <= 1e-8 * detail::atom_scale(g));
    }
}

TEST_CASE("doubled weight yields an inequivalence certificate") {
    CorrelationGeometry g = random_geometry(4, 4, 7);
    CorrelationGeometry h = g;
    h.measure.atoms[0].weight *= 2;
    EquivalenceVerdict v = find_witness(g, h, 1e-8, 0);
    REQUIRE(v.kind == EquivalenceVerdict::Kind::Inequivalent);
    REQUIRE(v.certificate.has_value());
    // the certificate is checkable: recompute the named invariant
    InvariantProfile p1 = invariant_profile(g);
    InvariantProfile p2 = invariant_profile(h);
    CHECK(std::abs(p1.total_mass - p2.total_mass) > 1e-8);
}

TEST_CASE("circles of different radius are inequivalent") {
    EffectiveModel r1 = circle_plane_waves(16, 1);
    EffectiveModel r2 = r1;
    r2.manifold.weights *= 2.0; // radius-2 circle: doubled arc weights
    EquivalenceVerdict v =
        check_equivalence(pushforward(r1, 1e-8), pushforward(r2, 1e-8), 1e-8);
    CHECK(v.kind == EquivalenceVerdict::Kind::Inequivalent);
    CHECK(v.certificate.has_value());
}

TEST_CASE("verdicts are stable under argument swap") {
    CorrelationGeometry g = random_geometry(5, 6, 11);
    CorrelationGeometry c = conjugated(g, random_unitary(5, 12));
    CorrelationGeometry bad = g;
    bad.measure.atoms[0].weight += 0.5;
    auto v12 = check_equivalence(g, c, 1e-8);
    auto v21 = check_equivalence(c, g, 1e-8);
    CHECK(v12.equivalent());
    CHECK(v21.equivalent());
    auto w12 = check_equivalence(g, bad, 1e-8);
    auto w21 = check_equivalence(bad, g, 1e-8);
    CHECK(w12.kind == EquivalenceVerdict::Kind::Inequivalent);
    CHECK(w21.kind == EquivalenceVerdict::Kind::Inequivalent);
}

TEST_CASE("occupied signature slots block mixed-bound comparison") {
    CorrelationGeometry g1;
    g1.f = 2;
    g1.measure.atoms.push_back(
        {HermitianOperator(MatrixC::Identity(2, 2)), 1.0});
    g1.bound = {2, 0};
    CorrelationGeometry g2;
    g2.f = 2;
    MatrixC m(2, 2);
    m << 1, 0, 0, -1;
    g2.measure.atoms.push_back({HermitianOperator(m), 1.0});
    g2.bound = {1, 1};
    EquivalenceVerdict v = check_equivalence(g1, g2, 1e-8);
    CHECK(v.kind == EquivalenceVerdict::Kind::Inequivalent);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->invariant == "signature_bound");
}

TEST_CASE("self comparison across embedded dimensions") {
    // padding adds only unoccupied slots, so the comparison proceeds
    CorrelationGeometry g = random_geometry(3, 4, 21);
    CorrelationGeometry e = embed(g, 5);
    EquivalenceVerdict v = check_equivalence(g, e, 1e-8);
    CHECK(v.equivalent());
}

TEST_CASE("gauge check on the plane-wave circle") {
    EffectiveModel m = circle_plane_waves(16, 2);
    const int n = 16;
    SUBCASE("zero chi gives zero deviation") {
        GaugeFunction chi;
        chi.values = VectorR::Zero(n);
        chi.jets.assign(n, VectorR::Zero(1));
        GaugeReport rep = gauge_check(m, chi, 1.0, 1e-8);
        CHECK(rep.max_form_deviation == doctest::Approx(0.0));
        CHECK(rep.verdict.equivalent());
    }
    SUBCASE("constant chi is exactly invariant") {
        GaugeFunction chi;
        chi.values = VectorR::Constant(n, 0.7);
        chi.jets.assign(n, VectorR::Zero(1));
        GaugeReport rep = gauge_check(m, chi, 1.3, 1e-8);
        CHECK(rep.max_form_deviation <= 1e-14);
        CHECK(rep.verdict.equivalent());
    }
    SUBCASE("chi = sin theta") {
        GaugeFunction chi;
        chi.values.resize(n);
        chi.jets.resize(n);
        for (int k = 0; k < n; ++k) {
            double theta = m.manifold.coords[k](0);
            chi.values(k) = std::sin(theta);
            chi.jets[k] = VectorR::Constant(1, std::cos(theta));
        }
        GaugeReport rep = gauge_check(m, chi, 1.0, 1e-8);
        CHECK(rep.max_form_deviation <= 1e-13);
        CHECK(rep.verdict.equivalent());
        CHECK(rep.verdict.residual <= 1e-8);
    }
}

TEST_CASE("gradient form is not admissible for the gauge check") {
    EffectiveModel m = circle_trig_pair(16);
    GaugeFunction chi;
    chi.values = VectorR::Zero(16);
    chi.jets.assign(16, VectorR::Zero(1));
    CHECK_THROWS_AS(gauge_check(m, chi, 1.0, 1e-8), FormNotCovariant);
}

TEST_CASE("lattice dirac gauge pair is equivalent") {
    const int n = 16;
    const double a = 1.0, q = 1.0;
    VectorR base = VectorR::Constant(n, 0.3); // holonomy breaks degeneracies
    VectorR chi(n);
    for (int j = 0; j < n; ++j)
        chi(j) = 0.4 * std::sin(2.0 * std::numbers::pi * j / n);
    VectorR shifted = base;
    for (int j = 0; j < n; ++j)
        shifted(j) += (chi((j + 1) % n) - chi(j)) / a;
    EffectiveModel m1 = lattice_dirac_sea({n, a, 1.0, q, base}, 8);
    EffectiveModel m2 = lattice_dirac_sea({n, a, 1.0, q, shifted}, 8);
    // the gauge multiplication e^{-i q chi} intertwines the two seas up
    // to the basis ambiguity of the eigensolver, which the cross Gram
    // absorbs
    GaugeFunction gf;
    gf.values = chi;
    EffectiveModel phased = apply_gauge_phase(m1, gf, q);
    std::vector<MatrixC> hints = {
        intertwiner_witness(gram(m1), gram(m2), cross_gram(m2, phased))};
    EquivalenceVerdict v = check_equivalence(pushforward(m1, 1e-8),
                                             pushforward(m2, 1e-8), 1e-9, 0,
                                             hints);
    REQUIRE(v.equivalent());
    CHECK(v.residual <= 1e-9 * 8);
}

TEST_CASE("diffeo checks on the circle") {
    EffectiveModel m = circle_trig_pair(16);
    SUBCASE("identity") {
        std::vector<int> perm(16);
        for (int k = 0; k < 16; ++k)
            perm[k] = k;
        std::vector<MatrixR> jac(16, MatrixR::Identity(1, 1));
        EquivalenceVerdict v = diffeo_check(m, perm, jac, 1e-8);
        REQUIRE(v.equivalent());
        CHECK(v.residual == doctest::Approx(0.0));
    }
    SUBCASE("rotation") {
        EffectiveModel r = rotate_circle(m, 5);
        EquivalenceVerdict v = check_equivalence(pushforward(m, 1e-8),
                                                 pushforward(r, 1e-8), 1e-8);
        CHECK(v.equivalent());
    }
    SUBCASE("reflection") {
        EffectiveModel r = reflect_circle(m);
        EquivalenceVerdict v = check_equivalence(pushforward(m, 1e-8),
                                                 pushforward(r, 1e-8), 1e-8);
        CHECK(v.equivalent());
    }
}

TEST_CASE("check_symmetry basics") {
    CorrelationGeometry g = pushforward(circle_plane_waves(16, 2), 1e-8);
    SUBCASE("identity is a symmetry") {
        SymmetryReport rep =
            check_symmetry(g, MatrixC::Identity(g.f, g.f), 1e-10);
        CHECK(rep.symmetric);
        CHECK(rep.max_discrepancy == doctest::Approx(0.0));
    }
    SUBCASE("a global phase is a symmetry") {
        MatrixC u = std::exp(Complex(0, 0.9)) * MatrixC::Identity(g.f, g.f);
        CHECK(check_symmetry(g, u, 1e-10).symmetric);
    }
    SUBCASE("a random unitary is generically not a symmetry") {
        MatrixC u = random_unitary(g.f, 5);
        CHECK_FALSE(check_symmetry(g, u, 1e-10).symmetric);
    }
    SUBCASE("rejects non-unitary input") {
        CHECK_THROWS_AS(check_symmetry(g, 2.0 * MatrixC::Identity(g.f, g.f),
                                       1e-10),
                        NotUnitary);
    }
}

TEST_CASE("induced lattice translation is a symmetry of the plane-wave cloud") {
    EffectiveModel m = circle_plane_waves(32, 3);
    CorrelationGeometry g = pushforward(m, 1e-8);
    for (int shift : {0, 1, 5, 16, 31, 32}) {
        MatrixC u = induced_translation_unitary(m, shift);
        CHECK(is_unitary(u));
        SymmetryReport rep = check_symmetry(g, u, 1e-10);
        CAPTURE(shift);
        CHECK(rep.symmetric);
        CHECK(rep.max_discrepancy <= 1e-10);
        // group inverse closure
        SymmetryReport inv = check_symmetry(g, u.adjoint(), 1e-10);
        CHECK(rep.symmetric == inv.symmetric);
    }
}

TEST_CASE("induced translation unitary phases") {
    EffectiveModel m = circle_plane_waves(8, 1);
    MatrixC u0 = induced_translation_unitary(m, 0);
    CHECK((u0 - MatrixC::Identity(3, 3)).norm() < 1e-12);
    MatrixC ufull = induced_translation_unitary(m, 8);
    CHECK((ufull - MatrixC::Identity(3, 3)).norm() < 1e-12);
    // one-site shift: eigenphases are e^{i k 2 pi / N}, k = -1, 0, 1
    MatrixC u1 = induced_translation_unitary(m, 1);
    Eigen::VectorXcd ev = u1.eigenvalues();
    std::vector<double> args;
    for (int i = 0; i < 3; ++i)
        args.push_back(std::arg(ev(i)));
    std::sort(args.begin(), args.end());
    double step = 2.0 * std::numbers::pi / 8;
    CHECK(args[0] == doctest::Approx(-step));
    CHECK(args[1] == doctest::Approx(0.0));
    CHECK(args[2] == doctest::Approx(step));
    CHECK_THROWS_AS(induced_translation_unitary(circle_trig_pair(8), 1),
                    Unsupported);
}
