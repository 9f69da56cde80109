#include <bhb/lattice.hpp>

#include <catch_amalgamated.hpp>

using namespace bhb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("metric profile", "[lattice]")
{
    MetricProfile pure(0.0);
    CHECK(pure(2.0) == 4.0);
    MetricProfile bh(2.0);
    CHECK(bh(2.0) == 0.0);
    CHECK(bh(3.0) == 3.0);
    CHECK(bh(1.0) == -1.0); // inside the horizon
    CHECK_THAT(bh.hawking_temperature(), WithinRel(2.0 / (4.0 * std::numbers::pi), 1e-15));
    CHECK(bh.lyapunov_target() == 1.0);
    CHECK_THROWS_AS(MetricProfile(-0.1), DomainError);
    CHECK_THROWS_AS(bh(-1.0), DomainError);
}

TEST_CASE("hoppings at integer spacing", "[lattice]")
{
    ChainConfig c;
    c.sites = 4;
    const HoppingProfile k0 = build_hoppings(MetricProfile(0.0), c);
    REQUIRE(k0.size() == 3);
    CHECK_THAT(k0.kappa[0], WithinAbs(0.0625, 1e-15));
    CHECK_THAT(k0.kappa[1], WithinAbs(0.5625, 1e-15));
    CHECK_THAT(k0.kappa[2], WithinAbs(1.5625, 1e-15));

    const HoppingProfile k2 = build_hoppings(MetricProfile(2.0), c);
    CHECK_THAT(k2.kappa[0], WithinAbs((0.25 - 1.0) / 4.0, 1e-15));
    CHECK(k2.kappa[0] < 0.0);
    CHECK(first_exterior_site(k2) == 2);
    CHECK(first_exterior_site(k0) == 0);
}

TEST_CASE("horizon anchor keeps every bond outside", "[lattice]")
{
    ChainConfig c;
    c.sites = 20;
    c.spacing = 0.1;
    c.anchor = SiteAnchor::horizon;
    const HoppingProfile k = build_hoppings(MetricProfile(1.5), c);
    for (double v : k.kappa)
        CHECK(v > 0.0);
    CHECK_THAT(bond_coordinate(c, 1.5, 0), WithinAbs(1.55, 1e-15));
    CHECK(first_exterior_site(k) == 0);
    CHECK(site_anchor_from_string("horizon") == SiteAnchor::horizon);
    CHECK_THROWS_AS(site_anchor_from_string("middle"), ConfigError);
}

TEST_CASE("hamiltonian layout", "[lattice]")
{
    ChainConfig c;
    c.sites = 3;
    c.mu = 1.0;
    const HoppingProfile k{{0.3, 0.7}};
    const SingleParticleHamiltonian h = build_hamiltonian(k, c);
    CHECK(h.h(0, 0) == 0.5);
    CHECK(h.h(0, 1) == -0.3);
    CHECK(h.h(2, 1) == -0.7);
    CHECK(h.h(0, 2) == 0.0);
    CHECK_THROWS_AS(build_hamiltonian(HoppingProfile{{0.1}}, c), SizeError);
    c.sites = 1;
    CHECK_THROWS_AS(c.validate(), SizeError);
}

TEST_CASE("spectral data", "[lattice]")
{
    SECTION("two sites")
    {
        ChainConfig c;
        c.sites = 2;
        const Spectrum s = spectral_data(build_hamiltonian(HoppingProfile{{1.0}}, c));
        CHECK_THAT(s.energies[0], WithinAbs(-1.0, 1e-14));
        CHECK_THAT(s.energies[1], WithinAbs(1.0, 1e-14));
        CHECK_THAT(s.ground_energy, WithinAbs(-1.0, 1e-14));
        CHECK_THAT(s.bandwidth, WithinAbs(2.0, 1e-14));
        CHECK_THAT(s.norm, WithinAbs(1.0, 1e-14));
    }
    SECTION("reconstruction and orthonormality at L = 60")
    {
        ChainConfig c;
        c.sites = 60;
        c.mu = 0.4;
        const SingleParticleHamiltonian h = chain_hamiltonian(MetricProfile(1.3), c);
        const Spectrum s = spectral_data(h);
        CHECK((reconstruct(s) - h.h).cwiseAbs().maxCoeff() < 1e-10);
        const Eigen::MatrixXd id = s.modes.transpose() * s.modes;
        CHECK((id - Eigen::MatrixXd::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-12);
        for (Eigen::Index k = 1; k < s.sites(); ++k)
            CHECK(s.energies[k] >= s.energies[k - 1]);
    }
    SECTION("dense path agrees with tridiagonal path")
    {
        ChainConfig c;
        c.sites = 12;
        SingleParticleHamiltonian h = chain_hamiltonian(MetricProfile(0.7), c);
        const Spectrum tri = spectral_data(h);
        h.h(0, 11) = h.h(11, 0) = 1e-300; // forces the dense solver
        const Spectrum dense = spectral_data(h);
        CHECK((tri.energies - dense.energies).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("asymmetric input")
    {
        SingleParticleHamiltonian h{Eigen::MatrixXd::Zero(2, 2)};
        h.h(0, 1) = 1.0;
        CHECK_THROWS_AS(spectral_data(h), NumericalError);
    }
}

TEST_CASE("scaled metric", "[lattice]")
{
    ChainConfig c;
    c.sites = 5;
    const ScaledMetric<MetricProfile> m{MetricProfile(1.0), 3.0};
    const HoppingProfile a = build_hoppings(m, c);
    const HoppingProfile b = build_hoppings(MetricProfile(1.0), c);
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK_THAT(a.kappa[k], WithinAbs(3.0 * b.kappa[k], 1e-14));
}
