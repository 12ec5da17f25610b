#include <doctest.h>

#include <corrgeo/model.hpp>

#include <numbers>

using namespace corrgeo;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

GaugeFunction sin_gauge(const EffectiveModel& m) {
    const int n = m.manifold.n_points();
    GaugeFunction chi;
    chi.values.resize(n);
    chi.jets.resize(n);
    for (int k = 0; k < n; ++k) {
        double theta = m.manifold.coords[k](0);
        chi.values(k) = std::sin(theta);
        chi.jets[k] = VectorR::Constant(1, std::cos(theta));
    }
    return chi;
}
} // namespace

TEST_CASE("circle_plane_waves constructor contract") {
    EffectiveModel m = circle_plane_waves(8, 1);
    CHECK(m.system.size() == 3);
    CHECK(m.manifold.n_points() == 8);
    CHECK(m.manifold.total_volume() == doctest::Approx(kTwoPi));
    // the k=0 field has identically zero jet
    const auto& zero_mode = m.system.fields[1];
    CHECK(zero_mode.label == "k=0");
    for (const auto& j : zero_mode.jets)
        CHECK(j.norm() == doctest::Approx(0.0));
    CHECK_THROWS_AS(circle_plane_waves(3, 1), Undersampled);
}

TEST_CASE("torus_tetrads is flat and unit volume") {
    EffectiveModel m = torus_tetrads(4);
    CHECK(m.manifold.n_points() == 16);
    CHECK(m.manifold.total_volume() == doctest::Approx(1.0));
    CHECK(m.system.size() == 2);
    CHECK(m.system.fields[0].vector_fiber);
}

TEST_CASE("lattice dirac spectrum is symmetric about zero") {
    LatticeDiracModel lat{16, 1.0, 1.0, 1.0, {}};
    MatrixC h = lattice_dirac_hamiltonian(lat);
    Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
    VectorR ev = es.eigenvalues();
    VectorR neg = (-ev).reverse();
    CHECK((ev - neg).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lattice dirac gauge shift leaves the spectrum invariant") {
    const int n = 16;
    VectorR a0 = VectorR::Zero(n);
    VectorR chi(n);
    for (int j = 0; j < n; ++j)
        chi(j) = std::sin(kTwoPi * j / n);
    VectorR a1(n);
    for (int j = 0; j < n; ++j)
        a1(j) = (chi((j + 1) % n) - chi(j)) / 1.0; // lattice difference
    LatticeDiracModel l0{n, 1.0, 1.0, 1.0, a0};
    LatticeDiracModel l1{n, 1.0, 1.0, 1.0, a1};
    Eigen::SelfAdjointEigenSolver<MatrixC> e0(lattice_dirac_hamiltonian(l0));
    Eigen::SelfAdjointEigenSolver<MatrixC> e1(lattice_dirac_hamiltonian(l1));
    CHECK((e0.eigenvalues() - e1.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lattice dirac sea rejects a degenerate cut") {
    // massless free model has zero modes straddling the half filling cut
    LatticeDiracModel lat{8, 1.0, 0.0, 1.0, {}};
    CHECK_THROWS_AS(lattice_dirac_sea(lat, 8), AmbiguousSeaCut);
}

TEST_CASE("lattice dirac sea builds a spinor reference system") {
    LatticeDiracModel lat{16, 1.0, 1.0, 1.0, {}};
    // with A = 0 the k and -k branches are degenerate, so the valid cuts at
    // N = 16 close full parity multiplets; 6 is the largest one below half
    // filling that leaves a clean gap
    EffectiveModel m = lattice_dirac_sea(lat, 6);
    CHECK(m.system.size() == 6);
    CHECK(m.system.fiber_dim() == 2);
    CHECK(m.manifold.total_volume() == doctest::Approx(16.0));
}

TEST_CASE("gauge phase with zero chi is the identity") {
    EffectiveModel m = circle_plane_waves(8, 1);
    GaugeFunction chi;
    chi.values = VectorR::Zero(8);
    chi.jets.assign(8, VectorR::Zero(1));
    EffectiveModel g = apply_gauge_phase(m, chi, 1.0);
    for (int i = 0; i < m.system.size(); ++i)
        for (int k = 0; k < 8; ++k)
            CHECK((g.system.fields[i].values[k] - m.system.fields[i].values[k])
                      .norm() == doctest::Approx(0.0));
}

TEST_CASE("gauge phase round trip chi then -chi") {
    EffectiveModel m = circle_plane_waves(16, 2);
    GaugeFunction chi = sin_gauge(m);
    GaugeFunction neg;
    neg.values = -chi.values;
    neg.jets.resize(chi.jets.size());
    for (size_t k = 0; k < chi.jets.size(); ++k)
        neg.jets[k] = -chi.jets[k];
    EffectiveModel round = apply_gauge_phase(apply_gauge_phase(m, chi, 1.5), neg, 1.5);
    for (int i = 0; i < m.system.size(); ++i)
        for (int k = 0; k < 16; ++k) {
            CHECK((round.system.fields[i].values[k] -
                   m.system.fields[i].values[k]).norm() < 1e-13);
            CHECK((round.system.fields[i].jets[k] -
                   m.system.fields[i].jets[k]).norm() < 1e-13);
        }
    CHECK(round.manifold.total_volume() ==
          doctest::Approx(m.manifold.total_volume()));
}

TEST_CASE("gauge phase requires chi jets when fields carry jets") {
    EffectiveModel m = circle_plane_waves(8, 1);
    GaugeFunction chi;
    chi.values = VectorR::Ones(8);
    CHECK_THROWS_AS(apply_gauge_phase(m, chi, 1.0), MissingJet);
}

TEST_CASE("gauge phase shifts the potential by d chi") {
    EffectiveModel m = circle_plane_waves(8, 1);
    GaugeFunction chi = sin_gauge(m);
    EffectiveModel g = apply_gauge_phase(m, chi, 2.0);
    REQUIRE(g.has_potential());
    for (int k = 0; k < 8; ++k)
        CHECK(g.potential_A[k](0) == doctest::Approx(chi.jets[k](0)));
}

TEST_CASE("identity diffeo leaves the model unchanged") {
    EffectiveModel m = circle_trig_pair(8);
    EffectiveModel d = rotate_circle(m, 0);
    for (int k = 0; k < 8; ++k) {
        CHECK(d.manifold.weights(k) == m.manifold.weights(k));
        CHECK((d.system.fields[0].values[k] - m.system.fields[0].values[k])
                  .norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("diffeos preserve the total volume exactly") {
    EffectiveModel m = circle_trig_pair(12);
    CHECK(rotate_circle(m, 5).manifold.total_volume() ==
          m.manifold.total_volume());
    CHECK(reflect_circle(m).manifold.total_volume() ==
          m.manifold.total_volume());
}

TEST_CASE("reflection transports jets with the sign flip") {
    const int n = 8;
    EffectiveModel m = circle_trig_pair(n);
    EffectiveModel r = reflect_circle(m);
    // cos is even: values match point-reflected, jets flip sign
    for (int k = 1; k < n; ++k) {
        CHECK(r.system.fields[0].values[k](0).real() ==
              doctest::Approx(m.system.fields[0].values[n - k](0).real()));
        CHECK(r.system.fields[0].jets[k](0, 0).real() ==
              doctest::Approx(-m.system.fields[0].jets[n - k](0, 0).real()));
    }
}

TEST_CASE("non-bijective permutation rejected") {
    EffectiveModel m = circle_trig_pair(8);
    std::vector<int> perm(8, 0);
    std::vector<MatrixR> jac(8, MatrixR::Identity(1, 1));
    CHECK_THROWS_AS(apply_diffeo(m, perm, jac), InvalidDiffeo);
}
