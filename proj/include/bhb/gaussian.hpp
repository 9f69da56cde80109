#ifndef BHB_GAUSSIAN_HPP
#define BHB_GAUSSIAN_HPP

// Gaussian-state engine for particle-conserving quadratic fermion Hamiltonians.
//
// Conventions:
//   C[m][n] = <c_m^dagger c_n>
//   G(t)    = exp(-i h t),  c_n(t) = sum_k G[n][k] c_k
//   C(t)    = G(t)^dagger C G(t)      (h real symmetric, so G^T = G)
//   <H>     = sum_mn h[m][n] C[m][n] = tr(h C)

#include <bhb/errors.hpp>
#include <bhb/lattice.hpp>
#include <bhb/schedule.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

namespace bhb {

using cplx = std::complex<double>;

struct CorrelationMatrix {
    Eigen::MatrixXcd c;
    Eigen::Index sites() const noexcept { return c.rows(); }
    double particle_number() const { return c.trace().real(); }
};

struct Propagator {
    Eigen::MatrixXcd g;
    double t = 0.0;
};

/// exp(-i h t) from the eigendecomposition.
inline Propagator propagator(const Spectrum& s, double t)
{
    const Eigen::VectorXcd phase =
        (s.energies.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    Propagator p;
    p.t = t;
    p.g = s.modes.cast<cplx>() * phase.asDiagonal() * s.modes.transpose().cast<cplx>();
    return p;
}

/// Projector onto the strictly negative modes; zero modes stay empty.
inline CorrelationMatrix ground_state(const Spectrum& s)
{
    const Eigen::Index n = s.sites();
    Eigen::Index filled = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (s.energies[k] < -zero_mode_tolerance)
            ++filled;
    // energies are ascending, so the filled modes are the leading columns
    const Eigen::MatrixXd occ = s.modes.leftCols(filled);
    return CorrelationMatrix{(occ * occ.transpose()).cast<cplx>()};
}

/// C(t) = G^dagger C0 G with G the propagator of s1. Negative t runs backwards.
inline CorrelationMatrix evolve(const CorrelationMatrix& c0, const Spectrum& s1, double t)
{
    if (c0.sites() != s1.sites())
        throw SizeError("correlation matrix and spectrum dimensions differ");
    const Eigen::MatrixXcd v = s1.modes.cast<cplx>();
    Eigen::MatrixXcd rotated = v.transpose() * c0.c * v;
    const Eigen::VectorXcd phase =
        (s1.energies.cast<cplx>() * cplx(0.0, t)).array().exp().matrix();
    // (D^* R D)_ab = e^{i e_a t} R_ab e^{-i e_b t}
    rotated = phase.asDiagonal() * rotated * phase.conjugate().asDiagonal();
    return CorrelationMatrix{v * rotated * v.transpose()};
}

/// <H> = tr(h C). The imaginary residue must vanish to round-off.
inline double energy_of(const CorrelationMatrix& c, const SingleParticleHamiltonian& h)
{
    if (c.sites() != h.sites())
        throw SizeError("correlation matrix and Hamiltonian dimensions differ");
    const cplx e = (h.h.cast<cplx>().cwiseProduct(c.c)).sum();
    const double scale = std::max(1.0, h.h.cwiseAbs().sum());
    if (std::abs(e.imag()) >= 1e-8 * scale)
        throw NumericalError("energy expectation has imaginary part " + std::to_string(e.imag()));
    return e.real();
}

/// Precomputed pair decomposition of <H0>_t - <H0>_0 for a state evolving under h1:
///
///   Delta E(t) = sum_{a<b} 2 M_ab [ Re R_ab (cos w_ab t - 1) - Im R_ab sin w_ab t ]
///
/// with M = V1^T h0 V1, R = V1^T C0 V1 and w_ab = e_a - e_b. No large cancellation
/// against <H0>_0 occurs, so tiny stored energies stay accurate.
class QuenchKernel {
public:
    QuenchKernel(const SingleParticleHamiltonian& h0, const Spectrum& s1, const CorrelationMatrix& c0)
    {
        if (h0.sites() != s1.sites() || c0.sites() != s1.sites())
            throw SizeError("quench kernel dimensions differ");
        const Eigen::MatrixXd& v = s1.modes;
        const Eigen::MatrixXd m = v.transpose() * h0.h * v;
        const Eigen::MatrixXcd r = v.transpose().cast<cplx>() * c0.c * v.cast<cplx>();
        const Eigen::Index n = s1.sites();
        std::size_t count = 0;
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = a + 1; b < n; ++b)
                if (m(a, b) != 0.0 && r(a, b) != cplx(0.0))
                    ++count;
        freq_.resize(static_cast<Eigen::Index>(count));
        wcos_.resize(freq_.size());
        wsin_.resize(freq_.size());
        Eigen::Index p = 0;
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = a + 1; b < n; ++b) {
                if (m(a, b) == 0.0 || r(a, b) == cplx(0.0))
                    continue;
                freq_[p] = s1.energies[a] - s1.energies[b];
                wcos_[p] = 2.0 * m(a, b) * r(a, b).real();
                wsin_[p] = 2.0 * m(a, b) * r(a, b).imag();
                ++p;
            }
    }

    double at(double t) const
    {
        const Eigen::ArrayXd half = freq_ * (0.5 * t);
        const Eigen::ArrayXd sh = half.sin();
        const Eigen::ArrayXd ch = half.cos();
        return accumulate(sh, ch);
    }

    /// Delta E on t_k = k dt, k < n. Half-angle rotation recurrence, resynchronized
    /// with exact sin/cos every few dozen steps.
    std::vector<double> on_grid(double dt, std::size_t n) const
    {
        constexpr std::size_t resync = 64;
        std::vector<double> out(n, 0.0);
        const Eigen::ArrayXd step = freq_ * (0.5 * dt);
        const Eigen::ArrayXd sd = step.sin();
        const Eigen::ArrayXd cd = step.cos();
        Eigen::ArrayXd sh(freq_.size()), ch(freq_.size()), tmp(freq_.size());
        for (std::size_t k = 0; k < n; ++k) {
            if (k % resync == 0) {
                const Eigen::ArrayXd half = freq_ * (0.5 * dt * static_cast<double>(k));
                sh = half.sin();
                ch = half.cos();
            } else {
                tmp = sh * cd + ch * sd;
                ch = ch * cd - sh * sd;
                sh = tmp;
            }
            out[k] = accumulate(sh, ch);
        }
        return out;
    }

    Eigen::Index pairs() const noexcept { return freq_.size(); }

private:
    double accumulate(const Eigen::ArrayXd& sh, const Eigen::ArrayXd& ch) const
    {
        // cos x - 1 = -2 sin^2(x/2), sin x = 2 sin(x/2) cos(x/2)
        return -2.0 * ((wcos_ * sh * sh).sum() + (wsin_ * sh * ch).sum());
    }

    Eigen::ArrayXd freq_;
    Eigen::ArrayXd wcos_;
    Eigen::ArrayXd wsin_;
};

/// Delta E(t) = <H0>_{C(t)} - E0 for the step protocol: C evolves under h1 for t <= tau
/// and under h0 afterwards. Spectra are passed in so callers can reuse them.
inline ChargeTrajectory delta_energy_series(const SingleParticleHamiltonian& h0, const Spectrum& s0,
                                            const Spectrum& s1, const QuenchSchedule& sched)
{
    sched.validate();
    const CorrelationMatrix c0 = ground_state(s0);
    const QuenchKernel kernel(h0, s1, c0);

    ChargeTrajectory traj;
    traj.tau = sched.tau;
    traj.times = sched.times();
    const std::size_t n = traj.times.size();
    std::size_t charging = 0;
    while (charging < n && traj.times[charging] <= sched.tau * (1.0 + 1e-12))
        ++charging;
    traj.energy = kernel.on_grid(sched.dt, charging);
    traj.energy.resize(n);
    if (charging < n) {
        const CorrelationMatrix at_tau = evolve(c0, s1, sched.tau);
        const double stored = kernel.at(sched.tau);
        const double e_tau = energy_of(at_tau, h0);
        // after switch-off the state evolves under h0; report the measured energy
        // relative to the value at switch-off so late samples inherit the kernel's accuracy
        for (std::size_t k = charging; k < n; ++k) {
            const CorrelationMatrix ck = evolve(at_tau, s0, traj.times[k] - sched.tau);
            traj.energy[k] = stored + (energy_of(ck, h0) - e_tau);
        }
    }
    traj.energy[0] = 0.0;
    normalize(traj, s0.bandwidth);
    return traj;
}

inline ChargeTrajectory delta_energy_series(const SingleParticleHamiltonian& h0,
                                            const SingleParticleHamiltonian& h1,
                                            const QuenchSchedule& sched)
{
    return delta_energy_series(h0, spectral_data(h0), spectral_data(h1), sched);
}

/// First grid time at which |G(t)[last][source]| exceeds `threshold`, if any up to t_max.
inline std::optional<double> boundary_arrival_time(const Spectrum& s, int source, double dt, double t_max,
                                                   double threshold = 1e-3)
{
    const Eigen::Index n = s.sites();
    if (source < 0 || source >= n)
        throw SizeError("source site out of range");
    const Eigen::ArrayXcd weight =
        (s.modes.row(n - 1).array() * s.modes.row(source).array()).transpose().cast<cplx>();
    const Eigen::ArrayXd energies = s.energies.array();
    const std::size_t steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = dt * static_cast<double>(k);
        const Eigen::ArrayXd ang = -energies * t;
        const cplx amp = (weight * (ang.cos().cast<cplx>() + cplx(0.0, 1.0) * ang.sin().cast<cplx>())).sum();
        if (std::abs(amp) > threshold && !(source == n - 1 && k == 0))
            return t;
    }
    return std::nullopt;
}

/// Worst-case Gaussian-state invariants observed on a set of checkpoints.
struct GaussianAudit {
    double hermiticity = 0.0;   // max |C - C^dagger|
    double purity = 0.0;        // max |C^2 - C|
    double eig_min = 0.0;       // smallest eigenvalue seen
    double eig_max = 0.0;       // largest eigenvalue seen
    double trace_drift = 0.0;   // max |tr C(t) - tr C(0)|
    double post_switch_drift = 0.0; // max |Delta E(t) - Delta E(tau)| for t > tau
    double kernel_mismatch = 0.0;   // max |kernel Delta E - tr(h0 C(t)) + E0|
    int checkpoints = 0;

    void absorb(const CorrelationMatrix& c, double reference_trace)
    {
        const Eigen::MatrixXcd herm = c.c - c.c.adjoint();
        hermiticity = std::max(hermiticity, herm.cwiseAbs().maxCoeff());
        purity = std::max(purity, (c.c * c.c - c.c).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (c.c + c.c.adjoint()), Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (checkpoints == 0) {
            eig_min = lo;
            eig_max = hi;
        } else {
            eig_min = std::min(eig_min, lo);
            eig_max = std::max(eig_max, hi);
        }
        trace_drift = std::max(trace_drift, std::abs(c.particle_number() - reference_trace));
        ++checkpoints;
    }

    void merge(const GaussianAudit& o)
    {
        if (o.checkpoints == 0)
            return;
        hermiticity = std::max(hermiticity, o.hermiticity);
        purity = std::max(purity, o.purity);
        eig_min = checkpoints ? std::min(eig_min, o.eig_min) : o.eig_min;
        eig_max = checkpoints ? std::max(eig_max, o.eig_max) : o.eig_max;
        trace_drift = std::max(trace_drift, o.trace_drift);
        post_switch_drift = std::max(post_switch_drift, o.post_switch_drift);
        kernel_mismatch = std::max(kernel_mismatch, o.kernel_mismatch);
        checkpoints += o.checkpoints;
    }
};

/// Evolves explicitly to `checkpoints` times in (0, switch_off] under h1, then to as many
/// times in (switch_off, t_end] under h0, recording state invariants and energy drift.
inline GaussianAudit audit_quench(const SingleParticleHamiltonian& h0, const Spectrum& s0, const Spectrum& s1,
                                  double switch_off, double t_end, int checkpoints)
{
    GaussianAudit audit;
    const CorrelationMatrix c0 = ground_state(s0);
    const QuenchKernel kernel(h0, s1, c0);
    const double n0 = c0.particle_number();
    const double e0 = s0.ground_energy;
    audit.absorb(c0, n0);
    for (int k = 1; k <= checkpoints; ++k) {
        const double t = switch_off * k / checkpoints;
        const CorrelationMatrix ct = evolve(c0, s1, t);
        audit.absorb(ct, n0);
        audit.kernel_mismatch =
            std::max(audit.kernel_mismatch, std::abs(kernel.at(t) - (energy_of(ct, h0) - e0)));
    }
    if (t_end > switch_off) {
        const CorrelationMatrix at_tau = evolve(c0, s1, switch_off);
        const double e_tau = energy_of(at_tau, h0);
        for (int k = 1; k <= checkpoints; ++k) {
            const double t = (t_end - switch_off) * k / checkpoints;
            const CorrelationMatrix ct = evolve(at_tau, s0, t);
            audit.absorb(ct, n0);
            audit.post_switch_drift = std::max(audit.post_switch_drift, std::abs(energy_of(ct, h0) - e_tau));
        }
    }
    return audit;
}

} // namespace bhb

#endif // BHB_GAUSSIAN_HPP
