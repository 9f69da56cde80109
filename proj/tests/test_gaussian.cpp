#include <bhb/charging.hpp>
#include <bhb/gaussian.hpp>

#include <catch_amalgamated.hpp>

using namespace bhb;
using Catch::Matchers::WithinAbs;

namespace {

ChainConfig chain(int sites, double mu = 0.0)
{
    ChainConfig c;
    c.sites = sites;
    c.mu = mu;
    return c;
}

} // namespace

TEST_CASE("ground state correlation matrix", "[gaussian]")
{
    const Spectrum s = spectral_data(chain_hamiltonian(MetricProfile(1.0), chain(30)));
    const CorrelationMatrix c = ground_state(s);
    CHECK((c.c * c.c - c.c).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THAT(c.particle_number(), WithinAbs(15.0, 1e-12));
    const SingleParticleHamiltonian h = chain_hamiltonian(MetricProfile(1.0), chain(30));
    CHECK_THAT(energy_of(c, h), WithinAbs(s.ground_energy, 1e-11));
}

TEST_CASE("zero modes stay empty", "[gaussian]")
{
    // three sites, uniform hopping: energies -sqrt2, 0, sqrt2
    ChainConfig c = chain(3);
    const Spectrum s = spectral_data(build_hamiltonian(HoppingProfile{{1.0, 1.0}}, c));
    CHECK(std::abs(s.energies[1]) < zero_mode_tolerance);
    CHECK_THAT(ground_state(s).particle_number(), WithinAbs(1.0, 1e-14));
}

TEST_CASE("propagator is unitary and evolution reverses", "[gaussian]")
{
    const SingleParticleHamiltonian h = chain_hamiltonian(MetricProfile(2.0), chain(40, 0.3));
    const Spectrum s = spectral_data(h);
    const Propagator g = propagator(s, 1.7);
    CHECK((g.g.adjoint() * g.g - Eigen::MatrixXcd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-12);

    const Spectrum s0 = spectral_data(chain_hamiltonian(MetricProfile(0.0), chain(40, 0.3)));
    const CorrelationMatrix c0 = ground_state(s0);
    const CorrelationMatrix fwd = evolve(c0, s, 3.0);
    const CorrelationMatrix back = evolve(fwd, s, -3.0);
    CHECK((back.c - c0.c).cwiseAbs().maxCoeff() < 1e-9);

    // evolve agrees with G^dagger C G
    const Eigen::MatrixXcd direct = propagator(s, 3.0).g.adjoint() * c0.c * propagator(s, 3.0).g;
    CHECK((direct - fwd.c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quench kernel matches explicit energies", "[gaussian]")
{
    const QuenchPair q = make_quench_pair(0.0, 2.0, chain(24, 0.2));
    const Spectrum s0 = spectral_data(q.h0);
    const Spectrum s1 = spectral_data(q.h1);
    const CorrelationMatrix c0 = ground_state(s0);
    const QuenchKernel k(q.h0, s1, c0);
    const std::vector<double> grid = k.on_grid(0.05, 300);
    for (std::size_t n : {0u, 1u, 63u, 64u, 65u, 150u, 299u}) {
        const double t = 0.05 * static_cast<double>(n);
        const double explicit_de = energy_of(evolve(c0, s1, t), q.h0) - s0.ground_energy;
        CHECK_THAT(grid[n], WithinAbs(explicit_de, 1e-10));
        CHECK_THAT(k.at(t), WithinAbs(grid[n], 1e-11));
    }
}

TEST_CASE("delta energy series", "[gaussian]")
{
    const QuenchPair q = make_quench_pair(0.5, 2.5, chain(20));
    const QuenchSchedule sched{1.5, 4.0, 0.05};
    const ChargeTrajectory t = delta_energy_series(q.h0, q.h1, sched);
    REQUIRE(t.size() == sched.samples());
    CHECK(t.energy[0] == 0.0);
    const std::size_t k_tau = 30;
    REQUIRE(std::abs(t.times[k_tau] - 1.5) < 1e-12);
    for (std::size_t k = k_tau; k < t.size(); ++k)
        CHECK_THAT(t.energy[k], WithinAbs(t.energy[k_tau], 1e-9));
    for (double e : t.energy_norm)
        CHECK(e >= -1e-9);

    SECTION("commuting quench stores nothing")
    {
        const QuenchPair same = make_quench_pair(1.0, 1.0, chain(20));
        const ChargeTrajectory z = delta_energy_series(same.h0, same.h1, sched);
        for (double e : z.energy)
            CHECK(std::abs(e) < 1e-10);
    }
}

TEST_CASE("boundary arrival", "[gaussian]")
{
    const Spectrum s = spectral_data(build_hamiltonian(HoppingProfile(std::vector<double>(29, 1.0)), chain(30)));
    const auto t = boundary_arrival_time(s, 0, 0.01, 40.0);
    REQUIRE(t.has_value());
    // light cone speed 2 kappa: 29 sites need roughly 14.5 time units
    CHECK(*t > 5.0);
    CHECK(*t < 14.5);
    CHECK_FALSE(boundary_arrival_time(s, 0, 0.01, 1.0).has_value());
    CHECK_THROWS_AS(boundary_arrival_time(s, 30, 0.01, 1.0), SizeError);
}

TEST_CASE("gaussian audit", "[gaussian]")
{
    const QuenchPair q = make_quench_pair(0.0, 3.0, chain(30, 1.0));
    const Spectrum s0 = spectral_data(q.h0);
    const Spectrum s1 = spectral_data(q.h1);
    const GaussianAudit a = audit_quench(q.h0, s0, s1, 2.0, 5.0, 4);
    CHECK(a.checkpoints == 9);
    CHECK(a.purity < 1e-9);
    CHECK(a.eig_min > -1e-10);
    CHECK(a.eig_max < 1.0 + 1e-10);
    CHECK(a.trace_drift < 1e-10);
    CHECK(a.post_switch_drift < 1e-9);
    CHECK(a.kernel_mismatch < 1e-9);
}
