#ifndef BHB_EXACT_HPP
#define BHB_EXACT_HPP

// Dense many-body reference for short chains.
//
// Basis: integer s in [0, 2^L); bit n of s is the occupation of site n (site 0 is the
// least significant bit), sigma^z_n = 1 - 2 n_n. Jordan-Wigner strings run over the
// sites below n: c_n = prod_{k<n} sigma^z_k a_n.
//
// H = sum_b -(kappa_b / 2) (X_b X_{b+1} + Y_b Y_{b+1}) + sum_n (mu / 2) n_n
//
// The factor 1/2 in front of the XY coupling is what makes H equal to the quadratic
// form sum_mn h_mn c_m^dagger c_n, so its spectrum is the set of single-particle
// subset sums.

#include <bhb/errors.hpp>
#include <bhb/lattice.hpp>
#include <bhb/schedule.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace bhb {

inline constexpr int max_dense_sites = 12;
inline constexpr int max_operator_sites = 8;

struct ManyBodyHamiltonian {
    Eigen::MatrixXd h;
    int sites = 0;
    Eigen::Index dim() const noexcept { return h.rows(); }
};

namespace detail {

inline void check_dense_size(int sites, int cap)
{
    if (sites < 1 || sites > cap)
        throw SizeError("dense many-body construction supports 1..." + std::to_string(cap) + " sites, got " +
                        std::to_string(sites));
}

inline bool occupied(std::uint32_t s, int n) { return (s >> n) & 1u; }

/// Diagonal element and hopping moves of one basis state; `emit(target, amplitude)`.
template <class Emit>
void apply_xy(const HoppingProfile& k, const ChainConfig& c, std::uint32_t s, Emit&& emit)
{
    double diag = 0.0;
    for (int n = 0; n < c.sites; ++n)
        diag += occupied(s, n) ? 0.5 * c.mu : 0.0;
    emit(s, diag);
    for (int b = 0; b + 1 < c.sites; ++b)
        if (occupied(s, b) != occupied(s, b + 1)) {
            // (XX + YY) |01> = 2 |10>
            const std::uint32_t t = s ^ ((1u << b) | (1u << (b + 1)));
            emit(t, -k.kappa[static_cast<std::size_t>(b)]);
        }
}

} // namespace detail

inline ManyBodyHamiltonian build_many_body(const HoppingProfile& k, const ChainConfig& c)
{
    c.validate();
    detail::check_dense_size(c.sites, max_dense_sites);
    if (k.size() != static_cast<std::size_t>(c.bonds()))
        throw SizeError("hopping profile does not match chain");
    const std::uint32_t dim = 1u << c.sites;
    ManyBodyHamiltonian out{Eigen::MatrixXd::Zero(dim, dim), c.sites};
    for (std::uint32_t s = 0; s < dim; ++s)
        detail::apply_xy(k, c, s, [&](std::uint32_t t, double a) { out.h(t, s) += a; });
    return out;
}

/// Fixed particle-number block of the XY Hamiltonian.
struct Sector {
    int particles = 0;
    std::vector<std::uint32_t> states; // ascending basis labels
    Eigen::MatrixXd h;
};

inline Sector build_sector(const HoppingProfile& k, const ChainConfig& c, int particles)
{
    c.validate();
    detail::check_dense_size(c.sites, max_dense_sites);
    if (particles < 0 || particles > c.sites)
        throw SizeError("particle number outside [0, L]");
    Sector sec;
    sec.particles = particles;
    const std::uint32_t dim = 1u << c.sites;
    std::vector<int> index(dim, -1);
    for (std::uint32_t s = 0; s < dim; ++s)
        if (std::popcount(s) == particles) {
            index[s] = static_cast<int>(sec.states.size());
            sec.states.push_back(s);
        }
    const Eigen::Index n = static_cast<Eigen::Index>(sec.states.size());
    sec.h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col)
        detail::apply_xy(k, c, sec.states[static_cast<std::size_t>(col)],
                         [&](std::uint32_t t, double a) { sec.h(index[t], col) += a; });
    return sec;
}

/// Jordan-Wigner annihilator c_n as a dense 2^L matrix.
inline Eigen::MatrixXd annihilator(int sites, int n)
{
    detail::check_dense_size(sites, max_dense_sites);
    if (n < 0 || n >= sites)
        throw SizeError("annihilator site out of range");
    const std::uint32_t dim = 1u << sites;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
    const std::uint32_t below = (1u << n) - 1u;
    for (std::uint32_t s = 0; s < dim; ++s)
        if (detail::occupied(s, n))
            c(s ^ (1u << n), s) = (std::popcount(s & below) % 2) ? -1.0 : 1.0;
    return c;
}

/// sum_mn h_mn c_m^dagger c_n built from Jordan-Wigner operators.
inline ManyBodyHamiltonian quadratic_many_body(const SingleParticleHamiltonian& sp)
{
    const int sites = static_cast<int>(sp.sites());
    detail::check_dense_size(sites, max_dense_sites);
    std::vector<Eigen::MatrixXd> c;
    for (int n = 0; n < sites; ++n)
        c.push_back(annihilator(sites, n));
    const Eigen::Index dim = Eigen::Index(1) << sites;
    ManyBodyHamiltonian out{Eigen::MatrixXd::Zero(dim, dim), sites};
    for (int m = 0; m < sites; ++m)
        for (int n = 0; n < sites; ++n)
            if (sp.h(m, n) != 0.0)
                out.h += sp.h(m, n) * (c[static_cast<std::size_t>(m)].transpose() * c[static_cast<std::size_t>(n)]);
    return out;
}

/// All 2^L sums of subsets of `energies`, ascending.
inline std::vector<double> subset_sums(const Eigen::VectorXd& energies)
{
    const int n = static_cast<int>(energies.size());
    detail::check_dense_size(n, max_dense_sites);
    std::vector<double> out(std::size_t(1) << n, 0.0);
    for (std::size_t s = 0; s < out.size(); ++s)
        for (int k = 0; k < n; ++k)
            if ((s >> k) & 1u)
                out[s] += energies[k];
    std::sort(out.begin(), out.end());
    return out;
}

inline Eigen::VectorXd dense_spectrum(const ManyBodyHamiltonian& h)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("dense eigensolver did not converge");
    return es.eigenvalues();
}

/// Largest |eigenvalue| of the dense Hamiltonian.
inline double dense_norm(const ManyBodyHamiltonian& h) { return dense_spectrum(h).cwiseAbs().maxCoeff(); }

struct ExactTrajectory {
    ChargeTrajectory trajectory;
    int particles = 0;        // sector of the chosen ground state
    int degeneracy = 1;       // many-body ground-state multiplicity across all sectors
    double ground_energy = 0.0;
    double norm_drift = 0.0;  // max | ||psi(t)|| - 1 |
    double charging_energy_drift = 0.0; // max |<H1>_t - <H1>_0| for t <= tau
};

/// Dense evolution of the many-body ground state of H0 under H1 for t <= tau and
/// under H0 afterwards. A degenerate ground state is reported; the lowest eigenvector
/// of the smallest particle number attaining the minimum is used.
inline ExactTrajectory exact_trajectory(const HoppingProfile& k0, const HoppingProfile& k1, const ChainConfig& c,
                                        const QuenchSchedule& sched)
{
    sched.validate();
    c.validate();
    detail::check_dense_size(c.sites, max_dense_sites);
    using cplx = std::complex<double>;

    std::vector<Sector> sectors0;
    std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> solvers0;
    double e_min = 0.0, e_max = 0.0;
    for (int n = 0; n <= c.sites; ++n) {
        sectors0.push_back(build_sector(k0, c, n));
        solvers0.emplace_back(sectors0.back().h);
        if (solvers0.back().info() != Eigen::Success)
            throw NumericalError("sector eigensolver did not converge");
        const auto& ev = solvers0.back().eigenvalues();
        e_min = n == 0 ? ev.minCoeff() : std::min(e_min, ev.minCoeff());
        e_max = n == 0 ? ev.maxCoeff() : std::max(e_max, ev.maxCoeff());
    }

    ExactTrajectory out;
    out.ground_energy = e_min;
    out.degeneracy = 0;
    const double tol = 1e-10 * std::max(1.0, std::abs(e_min));
    out.particles = -1;
    for (int n = 0; n <= c.sites; ++n) {
        const auto& ev = solvers0[static_cast<std::size_t>(n)].eigenvalues();
        for (Eigen::Index a = 0; a < ev.size(); ++a)
            if (ev[a] - e_min <= tol) {
                ++out.degeneracy;
                if (out.particles < 0)
                    out.particles = n;
            }
    }
    const std::size_t n0 = static_cast<std::size_t>(out.particles);
    const Eigen::VectorXcd psi0 = solvers0[n0].eigenvectors().col(0).cast<cplx>();
    const Eigen::MatrixXd& h0 = sectors0[n0].h;
    const Eigen::MatrixXd h1 = build_sector(k1, c, out.particles).h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(h1);
    if (es1.info() != Eigen::Success)
        throw NumericalError("sector eigensolver did not converge");

    auto evolve = [](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, const Eigen::VectorXcd& psi,
                     double t) {
        const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
        const Eigen::VectorXcd phase = (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
        return Eigen::VectorXcd(v * (phase.asDiagonal() * (v.adjoint() * psi)));
    };
    auto expect = [](const Eigen::MatrixXd& h, const Eigen::VectorXcd& psi) {
        return (psi.adjoint() * (h.cast<cplx>() * psi))(0, 0).real();
    };

    ChargeTrajectory& traj = out.trajectory;
    traj.tau = sched.tau;
    traj.times = sched.times();
    traj.energy.resize(traj.times.size());
    const double e1_start = expect(h1, psi0);
    const Eigen::VectorXcd psi_tau = evolve(es1, psi0, sched.tau);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        Eigen::VectorXcd psi;
        if (t <= sched.tau * (1.0 + 1e-12)) {
            psi = evolve(es1, psi0, t);
            out.charging_energy_drift = std::max(out.charging_energy_drift, std::abs(expect(h1, psi) - e1_start));
        } else {
            psi = evolve(solvers0[n0], psi_tau, t - sched.tau);
        }
        out.norm_drift = std::max(out.norm_drift, std::abs(psi.norm() - 1.0));
        traj.energy[k] = expect(h0, psi) - e_min;
    }
    traj.energy[0] = 0.0;
    normalize(traj, e_max - e_min);
    return out;
}

/// {c_j(t), c_src^dagger} for every j, each checked to be a multiple of the identity.
inline Eigen::VectorXcd exact_anticommutator_column(const HoppingProfile& k, const ChainConfig& c, int src,
                                                    double t)
{
    c.validate();
    detail::check_dense_size(c.sites, max_operator_sites);
    using cplx = std::complex<double>;
    const ManyBodyHamiltonian h = build_many_body(k, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.h);
    if (es.info() != Eigen::Success)
        throw NumericalError("dense eigensolver did not converge");
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
    const Eigen::VectorXcd phase = (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    const Eigen::MatrixXcd u = v * phase.asDiagonal() * v.adjoint(); // exp(-iHt)
    const Eigen::MatrixXcd cd = annihilator(c.sites, src).transpose().cast<cplx>();
    const double dim = static_cast<double>(h.dim());

    Eigen::VectorXcd out(c.sites);
    for (int j = 0; j < c.sites; ++j) {
        const Eigen::MatrixXcd cj = annihilator(c.sites, j).cast<cplx>();
        const Eigen::MatrixXcd cj_t = u.adjoint() * cj * u; // Heisenberg picture
        Eigen::MatrixXcd a = cj_t * cd + cd * cj_t;
        const cplx scalar = a.trace() / dim;
        a.diagonal().array() -= scalar;
        const double off = a.cwiseAbs().maxCoeff();
        if (off > 1e-10)
            throw NumericalError("anticommutator is not a scalar (residual " + std::to_string(off) + ")");
        out[j] = scalar;
    }
    return out;
}

inline std::complex<double> exact_anticommutator(const HoppingProfile& k, const ChainConfig& c, int i, int j,
                                                 double t)
{
    if (i < 0 || i >= c.sites || j < 0 || j >= c.sites)
        throw SizeError("anticommutator sites out of range");
    return exact_anticommutator_column(k, c, j, t)[i];
}

/// Position variance of a particle released at `src`, from exact anticommutators.
inline double exact_spread(const HoppingProfile& k, const ChainConfig& c, int src, double t)
{
    const Eigen::VectorXcd g = exact_anticommutator_column(k, c, src, t);
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < c.sites; ++j) {
        const double p = std::norm(g[j]);
        w += p;
        m1 += p * j;
        m2 += p * j * j;
    }
    return m2 / w - (m1 / w) * (m1 / w);
}

} // namespace bhb

#endif // BHB_EXACT_HPP
