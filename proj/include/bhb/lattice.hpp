#ifndef BHB_LATTICE_HPP
#define BHB_LATTICE_HPP

// Discretized curved-spacetime chain: metric, bond hoppings, the single-particle
// hopping matrix and its eigensystem.

#include <bhb/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <numbers>
#include <string>
#include <vector>

namespace bhb {

/// Asymptotically AdS2 black hole, f(x) = x^2 (1 - x_h / x).
///
/// The function is evaluated in the polynomial form x^2 - x_h x, which is the
/// continuous extension of the rational form to x = 0 (where 1 - x_h/x is
/// singular for x_h > 0).
class MetricProfile {
public:
    MetricProfile() = default;
    explicit MetricProfile(double horizon) : horizon_(horizon)
    {
        if (!(horizon >= 0.0) || !std::isfinite(horizon))
            throw DomainError("horizon radius must be finite and >= 0, got " + std::to_string(horizon));
    }

    double horizon() const noexcept { return horizon_; }

    double operator()(double x) const
    {
        if (!(x >= 0.0))
            throw DomainError("metric coordinate must be >= 0, got " + std::to_string(x));
        return x * x - horizon_ * x;
    }

    double hawking_temperature() const noexcept { return horizon_ / (4.0 * std::numbers::pi); }
    /// Chaos-bound Lyapunov exponent 2 pi T.
    double lyapunov_target() const noexcept { return 0.5 * horizon_; }

private:
    double horizon_ = 0.0;
};

/// Any metric family usable for hopping construction.
template <class M>
concept metric_function = requires(const M& m, double x) {
    { m(x) } -> std::convertible_to<double>;
    { m.horizon() } -> std::convertible_to<double>;
};

/// Metric multiplied by a constant factor; hoppings are linear in the metric.
template <metric_function M>
struct ScaledMetric {
    M base;
    double factor = 1.0;
    double operator()(double x) const { return factor * base(x); }
    double horizon() const { return base.horizon(); }
};

inline double metric_eval(const MetricProfile& m, double x) { return m(x); }

/// Where bond coordinates are measured from.
///  - origin:  x_b = (b + 1/2) d, independent of the horizon; bonds with x_b < x_h
///             carry negative hoppings.
///  - horizon: x_b = x_h + (b + 1/2) d, the chain covers only the exterior region.
enum class SiteAnchor { origin, horizon };

inline std::string to_string(SiteAnchor a) { return a == SiteAnchor::origin ? "origin" : "horizon"; }

inline SiteAnchor site_anchor_from_string(const std::string& s)
{
    if (s == "origin")
        return SiteAnchor::origin;
    if (s == "horizon")
        return SiteAnchor::horizon;
    throw ConfigError("anchor must be \"origin\" or \"horizon\", got \"" + s + "\"");
}

/// Open chain of `sites` sites with `sites - 1` bonds.
struct ChainConfig {
    int sites = 250;
    double spacing = 1.0;
    double mu = 0.0;
    SiteAnchor anchor = SiteAnchor::origin;

    int bonds() const noexcept { return sites - 1; }

    void validate() const
    {
        if (sites < 2)
            throw SizeError("chain needs at least 2 sites, got " + std::to_string(sites));
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw DomainError("lattice spacing must be > 0, got " + std::to_string(spacing));
        if (!std::isfinite(mu))
            throw DomainError("on-site potential must be finite");
    }
};

/// kappa[b] couples sites b and b+1 (0-based).
struct HoppingProfile {
    std::vector<double> kappa;
    std::size_t size() const noexcept { return kappa.size(); }
};

/// Position of bond b (0-based).
inline double bond_coordinate(const ChainConfig& c, double horizon, int b)
{
    const double local = (static_cast<double>(b) + 0.5) * c.spacing;
    return c.anchor == SiteAnchor::horizon ? horizon + local : local;
}

template <metric_function M>
HoppingProfile build_hoppings(const M& metric, const ChainConfig& c)
{
    c.validate();
    HoppingProfile p;
    p.kappa.resize(static_cast<std::size_t>(c.bonds()));
    for (int b = 0; b < c.bonds(); ++b)
        p.kappa[static_cast<std::size_t>(b)] =
            metric(bond_coordinate(c, metric.horizon(), b)) / (4.0 * c.spacing);
    return p;
}

/// Real symmetric tridiagonal matrix: mu/2 on the diagonal, -kappa[b] on (b, b+1).
struct SingleParticleHamiltonian {
    Eigen::MatrixXd h;
    Eigen::Index sites() const noexcept { return h.rows(); }
};

inline SingleParticleHamiltonian build_hamiltonian(const HoppingProfile& k, const ChainConfig& c)
{
    c.validate();
    if (k.size() != static_cast<std::size_t>(c.bonds()))
        throw SizeError("hopping profile has " + std::to_string(k.size()) + " bonds, chain needs " +
                        std::to_string(c.bonds()));
    const Eigen::Index n = c.sites;
    SingleParticleHamiltonian out{Eigen::MatrixXd::Zero(n, n)};
    out.h.diagonal().setConstant(0.5 * c.mu);
    for (Eigen::Index b = 0; b + 1 < n; ++b) {
        out.h(b, b + 1) = -k.kappa[static_cast<std::size_t>(b)];
        out.h(b + 1, b) = -k.kappa[static_cast<std::size_t>(b)];
    }
    return out;
}

template <metric_function M>
SingleParticleHamiltonian chain_hamiltonian(const M& metric, const ChainConfig& c)
{
    return build_hamiltonian(build_hoppings(metric, c), c);
}

/// Single-particle energies below this magnitude count as zero modes.
inline constexpr double zero_mode_tolerance = 1e-12;

/// Eigensystem of a single-particle Hamiltonian plus the many-body extremes it implies.
struct Spectrum {
    Eigen::VectorXd energies; // ascending
    Eigen::MatrixXd modes;    // column k is the mode of energies[k]
    double ground_energy = 0.0; // sum of negative energies
    double max_energy = 0.0;    // sum of positive energies
    double bandwidth = 0.0;     // max_energy - ground_energy
    double norm = 0.0;          // many-body max singular value

    Eigen::Index sites() const noexcept { return energies.size(); }
};

namespace detail {

inline bool is_tridiagonal(const Eigen::MatrixXd& h)
{
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            if (std::abs(i - j) > 1 && h(i, j) != 0.0)
                return false;
    return true;
}

} // namespace detail

inline Spectrum spectral_data(const SingleParticleHamiltonian& sp)
{
    const Eigen::MatrixXd& h = sp.h;
    if (h.rows() != h.cols() || h.rows() == 0)
        throw SizeError("single-particle Hamiltonian must be square and non-empty");
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw NumericalError("single-particle Hamiltonian is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (detail::is_tridiagonal(h)) {
        const Eigen::Index n = h.rows();
        Eigen::VectorXd diag = h.diagonal();
        Eigen::VectorXd sub = n > 1 ? Eigen::VectorXd(h.diagonal(-1)) : Eigen::VectorXd();
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    } else {
        solver.compute(h, Eigen::ComputeEigenvectors);
    }
    if (solver.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver did not converge");

    Spectrum s;
    s.energies = solver.eigenvalues();
    s.modes = solver.eigenvectors();
    for (Eigen::Index k = 0; k < s.modes.cols(); ++k) {
        Eigen::Index arg = 0;
        s.modes.col(k).cwiseAbs().maxCoeff(&arg);
        if (s.modes(arg, k) < 0.0)
            s.modes.col(k) *= -1.0;
    }
    for (Eigen::Index k = 0; k < s.energies.size(); ++k) {
        const double e = s.energies[k];
        if (e < -zero_mode_tolerance)
            s.ground_energy += e;
        else if (e > zero_mode_tolerance)
            s.max_energy += e;
    }
    s.bandwidth = s.max_energy - s.ground_energy;
    s.norm = std::max(s.max_energy, -s.ground_energy);
    return s;
}

/// modes * diag(energies) * modes^T.
inline Eigen::MatrixXd reconstruct(const Spectrum& s)
{
    return s.modes * s.energies.asDiagonal() * s.modes.transpose();
}

/// Left site of the first bond with positive hopping, i.e. the site nearest the
/// horizon from outside. Falls back to site 0 when no bond is positive.
inline int first_exterior_site(const HoppingProfile& k)
{
    for (std::size_t b = 0; b < k.size(); ++b)
        if (k.kappa[b] > 0.0)
            return static_cast<int>(b);
    return 0;
}

} // namespace bhb

#endif // BHB_LATTICE_HPP
