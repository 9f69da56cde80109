#ifndef BHB_SCHEDULE_HPP
#define BHB_SCHEDULE_HPP

#include <bhb/errors.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace bhb {

/// Step quench: charging Hamiltonian on for t in (0, tau], sampled every dt up to t_max.
struct QuenchSchedule {
    double tau = 10.0;
    double t_max = 10.0;
    double dt = 0.01;

    /// Full-window charging (tau = t_max), the mode used for metric extraction.
    static QuenchSchedule full(double t_max, double dt) { return {t_max, t_max, dt}; }

    void validate() const
    {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw DomainError("schedule.dt must be > 0");
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw DomainError("schedule.tau must be > 0");
        if (!(t_max >= tau) || !std::isfinite(t_max))
            throw DomainError("schedule.t_max must be >= tau");
        if (dt > tau * (1.0 + 1e-12))
            throw DomainError("schedule.dt must not exceed tau");
    }

    /// Number of grid points t_k = k dt with t_k <= t_max.
    std::size_t samples() const
    {
        return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    }

    double time(std::size_t k) const { return static_cast<double>(k) * dt; }

    std::vector<double> times() const
    {
        std::vector<double> t(samples());
        for (std::size_t k = 0; k < t.size(); ++k)
            t[k] = time(k);
        return t;
    }
};

/// Stored energy Delta E(t) = <H0>_t - <H0>_0 on a sample grid.
struct ChargeTrajectory {
    std::vector<double> times;
    std::vector<double> energy;      // energy units
    std::vector<double> energy_norm; // divided by bandwidth
    double bandwidth = 0.0;
    double tau = 0.0;

    std::size_t size() const noexcept { return times.size(); }
};

inline void normalize(ChargeTrajectory& traj, double bandwidth)
{
    if (!(bandwidth > 0.0))
        throw NumericalError("bandwidth is zero; stored energy cannot be normalized");
    traj.bandwidth = bandwidth;
    traj.energy_norm.resize(traj.energy.size());
    for (std::size_t k = 0; k < traj.energy.size(); ++k)
        traj.energy_norm[k] = traj.energy[k] / bandwidth;
}

} // namespace bhb

#endif // BHB_SCHEDULE_HPP
