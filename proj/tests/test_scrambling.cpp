#include <bhb/exact.hpp>
#include <bhb/scrambling.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bhb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ChainConfig chain(int sites, double spacing = 1.0, SiteAnchor anchor = SiteAnchor::origin)
{
    ChainConfig c;
    c.sites = sites;
    c.spacing = spacing;
    c.anchor = anchor;
    return c;
}

OtocSeries synthetic(double rate, double amplitude, double t_max, double dt)
{
    OtocSeries s;
    s.times = time_grid(t_max, dt);
    for (double t : s.times)
        s.d.push_back(amplitude * std::exp(rate * t));
    return s;
}

} // namespace

TEST_CASE("otoc series basics", "[scrambling]")
{
    const Spectrum s = spectral_data(chain_hamiltonian(MetricProfile(1.0), chain(20)));
    const OtocSeries same = otoc_series(s, 4, 4, {0.0});
    const OtocSeries other = otoc_series(s, 4, 9, {0.0});
    CHECK_THAT(same.d[0], WithinAbs(1.0, 1e-12));
    CHECK_THAT(other.d[0], WithinAbs(0.0, 1e-12));

    const std::vector<double> times{0.3, 1.0, 4.0};
    std::vector<double> total(times.size(), 0.0);
    for (int j = 0; j < 20; ++j) {
        const OtocSeries row = otoc_series(s, 3, j, times);
        for (std::size_t k = 0; k < times.size(); ++k)
            total[k] += row.d[k];
    }
    for (double v : total)
        CHECK_THAT(v, WithinAbs(1.0, 1e-10));
    CHECK_THROWS_AS(otoc_series(s, 0, 20, times), SizeError);
}

TEST_CASE("otoc causality on the uniform chain", "[scrambling]")
{
    const Spectrum s = spectral_data(build_hamiltonian(HoppingProfile(std::vector<double>(59, 1.0)), chain(60)));
    const int r = 40;
    const double t_cut = r / 2.0 * 0.1;
    const OtocSeries d = otoc_series(s, 5, 5 + r, time_grid(t_cut, t_cut / 20));
    for (double v : d.d)
        CHECK(v < 1e-12);
}

TEST_CASE("otoc matches exact anticommutators", "[scrambling]")
{
    const ChainConfig c = chain(7);
    const HoppingProfile k = build_hoppings(MetricProfile(2.0), c);
    const Spectrum s = spectral_data(build_hamiltonian(k, c));
    for (double t : {0.0, 0.8, 2.5})
        for (auto [i, j] : {std::pair{0, 0}, std::pair{1, 5}, std::pair{6, 2}}) {
            const double d = otoc_series(s, i, j, {t}).d[0];
            const std::complex<double> a = exact_anticommutator(k, c, i, j, t);
            CHECK_THAT(std::norm(a), WithinAbs(d, 1e-9));
            CHECK(std::abs(a) <= 1.0 + 1e-10);
        }
    CHECK_THAT(std::abs(exact_anticommutator(k, c, 3, 3, 0.0)), WithinAbs(1.0, 1e-12));
}

TEST_CASE("spread otoc", "[scrambling]")
{
    const ChainConfig c = chain(8, 0.5, SiteAnchor::horizon);
    const HoppingProfile k = build_hoppings(MetricProfile(1.0), c);
    const Spectrum s = spectral_data(build_hamiltonian(k, c));
    const OtocSeries sp = spread_otoc_series(s, 0, {0.0, 0.4, 1.3});
    CHECK_THAT(sp.d[0], WithinAbs(0.0, 1e-14));
    for (std::size_t n = 1; n < 3; ++n)
        CHECK_THAT(sp.d[n], WithinAbs(exact_spread(k, c, 0, sp.times[n]), 1e-9));
}

TEST_CASE("fit lyapunov", "[scrambling]")
{
    SECTION("exact exponential")
    {
        const LyapunovFit f = fit_lyapunov(synthetic(2.0, 1e-8, 10.0, 0.01), 1e-6, 1e-2);
        CHECK_THAT(f.lambda, WithinAbs(1.0, 1e-6));
        CHECK(f.t_lo < f.t_hi);
        CHECK(f.samples >= min_fit_samples);
        CHECK(f.std_error < 1e-6);
    }
    SECTION("constant series has no window")
    {
        OtocSeries s = synthetic(0.0, 1e-3, 5.0, 0.01);
        CHECK_THROWS_AS(fit_lyapunov(s, 1e-6, 1e-2), FitWindowError);
        s = synthetic(0.0, 1e-9, 5.0, 0.01);
        CHECK_THROWS_AS(fit_lyapunov(s, 1e-6, 1e-2), FitWindowError);
    }
    SECTION("saturation before the upper threshold")
    {
        OtocSeries s = synthetic(2.0, 1e-8, 10.0, 0.01);
        for (std::size_t k = 0; k < s.d.size(); ++k)
            if (s.times[k] > 5.0)
                s.d[k] = 1e-5 * std::exp(-(s.times[k] - 5.0));
        CHECK_THROWS_AS(fit_lyapunov(s, 1e-6, 1e-2), FitWindowError);
    }
    SECTION("too few samples")
    {
        CHECK_THROWS_AS(fit_lyapunov(synthetic(2.0, 1e-8, 10.0, 1.0), 1e-6, 1e-2), FitWindowError);
    }
    SECTION("threshold validation")
    {
        CHECK_THROWS_AS(fit_lyapunov(synthetic(2.0, 1e-8, 10.0, 0.01), 1e-2, 1e-6), DomainError);
    }
}

TEST_CASE("lyapunov scan flags pure AdS", "[scrambling]")
{
    OtocSettings o;
    o.probe = OtocProbe::spread;
    o.d_lo = 1.0;
    o.d_hi = 16.0;
    o.t_max = 4.0;
    o.dt = 0.01;
    const LyapunovScan scan = lyapunov_scan({0.0, 0.0}, chain(60, 0.02, SiteAnchor::horizon), o);
    CHECK(scan.flagged() == 2);
    CHECK_FALSE(scan.regression.has_value());
}

TEST_CASE("least squares", "[scrambling]")
{
    const LineFit f = least_squares({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
    CHECK_THAT(f.slope, WithinAbs(2.0, 1e-14));
    CHECK_THAT(f.intercept, WithinAbs(1.0, 1e-14));
    CHECK_THAT(f.r2, WithinAbs(1.0, 1e-14));
    CHECK_THROWS_AS(least_squares({1.0, 1.0}, {0.0, 1.0}), NumericalError);
}

TEST_CASE("nested commutator ladder", "[scrambling]")
{
    SECTION("diagonal hamiltonian commutes with densities")
    {
        SingleParticleHamiltonian h{Eigen::MatrixXd::Zero(5, 5)};
        h.h.diagonal() << 1.0, 2.0, 3.0, 4.0, 5.0;
        const CommutatorLadder l = nested_commutator_norms(h, density_probe(5, 2), 4);
        CHECK(l.norms[0] == 1.0);
        for (int k = 1; k <= 4; ++k)
            CHECK(l.norms[static_cast<std::size_t>(k)] == 0.0);
    }
    SECTION("two sites by hand")
    {
        const double kappa = 0.7;
        const SingleParticleHamiltonian h = build_hamiltonian(HoppingProfile{{kappa}}, chain(2));
        const CommutatorLadder l = nested_commutator_norms(h, density_probe(2, 0), 2);
        CHECK_THAT(l.norms[1], WithinAbs(kappa, 1e-14));
        CHECK_THAT(l.norms[2], WithinAbs(2.0 * kappa * kappa, 1e-14));
    }
    SECTION("homogeneity")
    {
        const SingleParticleHamiltonian h = chain_hamiltonian(MetricProfile(1.5), chain(30));
        const SingleParticleHamiltonian h2{2.5 * h.h};
        const Eigen::MatrixXd w = density_probe(30, 15);
        const CommutatorLadder a = nested_commutator_norms(h, w, 6);
        const CommutatorLadder b = nested_commutator_norms(h2, w, 6);
        for (int k = 1; k <= 6; ++k)
            CHECK_THAT(b.norms[static_cast<std::size_t>(k)],
                       WithinRel(std::pow(2.5, k) * a.norms[static_cast<std::size_t>(k)], 1e-9));
    }
    CHECK_THROWS_AS(nested_commutator_norms(build_hamiltonian(HoppingProfile{{1.0}}, chain(2)),
                                            density_probe(2, 0), 0),
                    DomainError);
}

TEST_CASE("nested scan layout", "[scrambling]")
{
    const auto rows = nested_scan({1.0, 2.0}, chain(20), 3);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].x_ht == 1.0);
    CHECK(rows[0].k == 1);
    CHECK(rows[5].x_ht == 2.0);
    CHECK(rows[5].k == 3);
}
