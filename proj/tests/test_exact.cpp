#include <bhb/charging.hpp>
#include <bhb/exact.hpp>

#include <catch_amalgamated.hpp>

#include <bit>

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

TEST_CASE("two-site XY block", "[exact]")
{
    const double kappa = 0.8;
    const ManyBodyHamiltonian h = build_many_body(HoppingProfile{{kappa}}, chain(2));
    const Eigen::VectorXd ev = dense_spectrum(h);
    // subset sums of {-kappa, +kappa}
    CHECK_THAT(ev[0], WithinAbs(-kappa, 1e-14));
    CHECK_THAT(ev[1], WithinAbs(0.0, 1e-14));
    CHECK_THAT(ev[2], WithinAbs(0.0, 1e-14));
    CHECK_THAT(ev[3], WithinAbs(kappa, 1e-14));
}

TEST_CASE("spin and fermion forms agree", "[exact]")
{
    for (double mu : {0.0, 1.3}) {
        const ChainConfig c = chain(6, mu);
        const HoppingProfile k = build_hoppings(MetricProfile(2.0), c); // mixed-sign hoppings
        const ManyBodyHamiltonian spin = build_many_body(k, c);
        const ManyBodyHamiltonian ferm = quadratic_many_body(build_hamiltonian(k, c));
        CHECK((spin.h - ferm.h).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("particle number is conserved", "[exact]")
{
    const ChainConfig c = chain(7, 0.4);
    const ManyBodyHamiltonian h = build_many_body(build_hoppings(MetricProfile(1.0), c), c);
    Eigen::VectorXd n(h.dim());
    for (Eigen::Index s = 0; s < h.dim(); ++s)
        n[s] = std::popcount(static_cast<unsigned>(s));
    const Eigen::MatrixXd comm = h.h * n.asDiagonal() - n.asDiagonal() * h.h;
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h.h - h.h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sector blocks reproduce the dense spectrum", "[exact]")
{
    const ChainConfig c = chain(6, 0.7);
    const HoppingProfile k = build_hoppings(MetricProfile(1.5), c);
    std::vector<double> all;
    for (int n = 0; n <= 6; ++n) {
        const Sector s = build_sector(k, c, n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.h, Eigen::EigenvaluesOnly);
        for (Eigen::Index a = 0; a < es.eigenvalues().size(); ++a)
            all.push_back(es.eigenvalues()[a]);
    }
    std::sort(all.begin(), all.end());
    const Eigen::VectorXd dense = dense_spectrum(build_many_body(k, c));
    REQUIRE(all.size() == static_cast<std::size_t>(dense.size()));
    for (std::size_t a = 0; a < all.size(); ++a)
        CHECK_THAT(all[a], WithinAbs(dense[static_cast<Eigen::Index>(a)], 1e-12));
}

TEST_CASE("anticommutator is canonical at t = 0", "[exact]")
{
    const ChainConfig c = chain(5);
    const HoppingProfile k = build_hoppings(MetricProfile(0.5), c);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK_THAT(std::abs(exact_anticommutator(k, c, i, j, 0.0)), WithinAbs(i == j ? 1.0 : 0.0, 1e-12));
}

TEST_CASE("exact trajectory", "[exact]")
{
    const ChainConfig c = chain(6);
    const QuenchSchedule sched{2.0, 4.0, 0.05};
    SECTION("identical Hamiltonians")
    {
        const HoppingProfile k = build_hoppings(MetricProfile(1.0), c);
        const ExactTrajectory ex = exact_trajectory(k, k, c, sched);
        for (double e : ex.trajectory.energy)
            CHECK(std::abs(e) < 1e-12);
    }
    SECTION("quench conserves norm and charging energy")
    {
        const QuenchPair q = make_quench_pair(0.0, 2.0, c);
        const ExactTrajectory ex = exact_trajectory(q.k0, q.k1, c, sched);
        CHECK(ex.norm_drift < 1e-12);
        CHECK(ex.charging_energy_drift < 1e-10);
        CHECK(ex.degeneracy == 1);
        CHECK(ex.particles == 3);
        const ChargeTrajectory fr = delta_energy_series(q.h0, q.h1, sched);
        for (std::size_t n = 0; n < fr.size(); ++n)
            CHECK_THAT(ex.trajectory.energy[n], WithinAbs(fr.energy[n], 1e-8));
    }
    SECTION("degenerate ground state is reported")
    {
        // three sites with equal hopping carry a zero mode
        const HoppingProfile k{{1.0, 1.0}};
        const ExactTrajectory ex = exact_trajectory(k, k, chain(3), sched);
        CHECK(ex.degeneracy == 2);
        CHECK(ex.particles == 1);
    }
}

TEST_CASE("size limits", "[exact]")
{
    const ChainConfig big = chain(13);
    CHECK_THROWS_AS(build_many_body(build_hoppings(MetricProfile(0.0), big), big), SizeError);
    const ChainConfig nine = chain(9);
    CHECK_THROWS_AS(exact_anticommutator(build_hoppings(MetricProfile(0.0), nine), nine, 0, 1, 0.1), SizeError);
}
