#ifndef BHB_SCRAMBLING_HPP
#define BHB_SCRAMBLING_HPP

// Chaos diagnostics for quadratic chains: OTOC growth from single-particle
// propagators, exponential-window fits and nested-commutator norm ladders.

#include <bhb/errors.hpp>
#include <bhb/lattice.hpp>
#include <bhb/parallel.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace bhb {

/// Uniform sample grid 0, dt, ..., t_max.
inline std::vector<double> time_grid(double t_max, double dt)
{
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw DomainError("time grid needs dt > 0 and t_max > 0");
    const std::size_t n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = dt * static_cast<double>(k);
    return t;
}

/// OTOC proxy sampled on a time grid. Sites are 0-based.
struct OtocSeries {
    int i = 0;
    int j = 0;
    std::vector<double> times;
    std::vector<double> d;
};

namespace detail {

/// Columns of the propagator G(t) = V e^{-i e t} V^T restricted to column `src`:
/// column(t) = A e^{-i e t} with A = V diag(V[src, :]).
class PropagatorColumn {
public:
    PropagatorColumn(const Spectrum& s, int src)
        : a_(s.modes * s.modes.row(src).transpose().asDiagonal()), e_(s.energies.array())
    {
    }

    void at(double t, Eigen::VectorXd& re, Eigen::VectorXd& im) const
    {
        const Eigen::ArrayXd ang = e_ * t;
        re.noalias() = a_ * ang.cos().matrix();
        im.noalias() = -(a_ * ang.sin().matrix());
    }

private:
    Eigen::MatrixXd a_;
    Eigen::ArrayXd e_;
};

inline void check_site(const Spectrum& s, int site, const char* name)
{
    if (site < 0 || site >= s.sites())
        throw SizeError(std::string(name) + " site " + std::to_string(site) + " outside chain of " +
                        std::to_string(s.sites()) + " sites");
}

} // namespace detail

/// D(t) = |G(t)[i][j]|^2, which equals |{c_i(t), c_j^dagger}|^2 for a quadratic Hamiltonian.
inline OtocSeries otoc_series(const Spectrum& s, int i, int j, const std::vector<double>& times)
{
    detail::check_site(s, i, "probe");
    detail::check_site(s, j, "probe");
    OtocSeries out{i, j, times, std::vector<double>(times.size())};
    const Eigen::ArrayXd w = (s.modes.row(i).array() * s.modes.row(j).array()).transpose();
    const Eigen::ArrayXd e = s.energies.array();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const Eigen::ArrayXd ang = e * times[k];
        const double re = (w * ang.cos()).sum();
        const double im = (w * ang.sin()).sum();
        out.d[k] = re * re + im * im;
    }
    return out;
}

/// Position-spread OTOC from site i: with X = sum_n n c_n^dagger c_n and the sharp
/// position P_i, -<i|[X(t), P_i]^2|i> = Var_i(X(t)) = sum_n |G_ni|^2 n^2 - (sum_n |G_ni|^2 n)^2.
/// Stored in `d` (units of sites^2); j is set equal to i.
inline OtocSeries spread_otoc_series(const Spectrum& s, int i, const std::vector<double>& times)
{
    detail::check_site(s, i, "probe");
    OtocSeries out{i, i, times, std::vector<double>(times.size())};
    const detail::PropagatorColumn col(s, i);
    const Eigen::ArrayXd pos = Eigen::ArrayXd::LinSpaced(s.sites(), 0.0, static_cast<double>(s.sites() - 1));
    Eigen::VectorXd re(s.sites()), im(s.sites());
    for (std::size_t k = 0; k < times.size(); ++k) {
        col.at(times[k], re, im);
        const Eigen::ArrayXd p = re.array().square() + im.array().square();
        const double total = p.sum();
        const double mean = (p * pos).sum() / total;
        const double var = (p * (pos - mean).square()).sum() / total;
        out.d[k] = std::max(var, 0.0);
    }
    return out;
}

struct LyapunovFit {
    double lambda = 0.0; // slope(log D) / 2
    double std_error = 0.0; // max(regression stderr, window-refit spread), same units as lambda
    double regression_stderr = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t samples = 0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = slope x + intercept.
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw SizeError("line fit needs at least two paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (!(sxx > 0.0))
        throw NumericalError("line fit abscissae are all equal");
    LineFit f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (f.slope * x[k] + f.intercept);
        ssr += r * r;
    }
    f.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

inline constexpr std::size_t min_fit_samples = 10;

namespace detail {

inline std::optional<LineFit> log_fit(const OtocSeries& s, std::size_t a, std::size_t b)
{
    if (b < a || b - a + 1 < min_fit_samples)
        return std::nullopt;
    std::vector<double> x, y;
    for (std::size_t k = a; k <= b; ++k) {
        if (!(s.d[k] > 0.0))
            return std::nullopt;
        x.push_back(s.times[k]);
        y.push_back(std::log(s.d[k]));
    }
    return least_squares(x, y);
}

} // namespace detail

/// Fit the first exponential window: D rises from below d_lo to above d_hi before its
/// first local maximum. The window runs from the first sample >= d_lo to the first
/// sample >= d_hi. Refits on the window shrunk and expanded by 20% at each end bound
/// the window systematics.
inline LyapunovFit fit_lyapunov(const OtocSeries& s, double d_lo, double d_hi)
{
    if (!(d_lo > 0.0) || !(d_hi > d_lo))
        throw DomainError("fit thresholds need 0 < d_lo < d_hi");
    if (s.times.size() != s.d.size())
        throw SizeError("OTOC series times and values differ in length");
    const std::size_t n = s.d.size();
    std::size_t up = 0;
    while (up < n && s.d[up] < d_lo)
        ++up;
    if (up == n)
        throw FitWindowError("OTOC never reaches the lower threshold " + std::to_string(d_lo));
    if (up == 0)
        throw FitWindowError("OTOC starts above the lower threshold " + std::to_string(d_lo));
    // saturation is looked for only after growth has started: below d_lo the signal
    // sits on a round-off floor with spurious extrema
    std::size_t peak = up;
    while (peak + 1 < n && s.d[peak + 1] >= s.d[peak])
        ++peak;
    std::size_t cross = up;
    while (cross <= peak && s.d[cross] < d_hi)
        ++cross;
    if (cross > peak)
        throw FitWindowError("OTOC saturates before reaching the upper threshold " + std::to_string(d_hi));
    const auto base = detail::log_fit(s, up, cross);
    if (!base)
        throw FitWindowError("exponential window holds " + std::to_string(cross - up + 1) + " samples, need " +
                             std::to_string(min_fit_samples));

    LyapunovFit f;
    f.lambda = 0.5 * base->slope;
    f.regression_stderr = 0.5 * base->slope_stderr;
    f.t_lo = s.times[up];
    f.t_hi = s.times[cross];
    f.samples = base->n;

    const double width = f.t_hi - f.t_lo;
    double spread = 0.0;
    for (double sign : {-1.0, 1.0}) {
        const double lo = f.t_lo - sign * 0.2 * width;
        const double hi = f.t_hi + sign * 0.2 * width;
        std::size_t a = 0;
        while (a < n && s.times[a] < lo - 1e-12)
            ++a;
        std::size_t b = a;
        while (b + 1 < n && s.times[b + 1] <= hi + 1e-12 && b + 1 <= peak)
            ++b;
        if (const auto v = detail::log_fit(s, a, b))
            spread = std::max(spread, std::abs(0.5 * v->slope - f.lambda));
    }
    f.std_error = std::max(f.regression_stderr, spread);
    return f;
}

enum class OtocProbe { spread, propagator };

inline std::string to_string(OtocProbe p) { return p == OtocProbe::spread ? "spread" : "propagator"; }

inline OtocProbe otoc_probe_from_string(const std::string& s)
{
    if (s == "spread")
        return OtocProbe::spread;
    if (s == "propagator")
        return OtocProbe::propagator;
    throw ConfigError("otoc probe must be \"spread\" or \"propagator\", got \"" + s + "\"");
}

struct OtocSettings {
    OtocProbe probe = OtocProbe::propagator;
    int source = -1;  // negative: first exterior site
    int offset = 10;  // j = i + offset for the propagator probe
    double d_lo = 1e-6;
    double d_hi = 1e-2;
    double t_max = 30.0;
    double dt = 0.005;

    void validate() const
    {
        if (!(d_lo > 0.0) || !(d_hi > d_lo))
            throw ConfigError("otoc.d_lo and otoc.d_hi need 0 < d_lo < d_hi");
        if (!(dt > 0.0) || !(t_max > dt))
            throw ConfigError("otoc.dt and otoc.t_max need 0 < dt < t_max");
    }
};

inline OtocSeries probe_series(const Spectrum& s, const HoppingProfile& k, const OtocSettings& o,
                               const std::vector<double>& times)
{
    const int i = o.source >= 0 ? o.source : first_exterior_site(k);
    if (o.probe == OtocProbe::spread)
        return spread_otoc_series(s, i, times);
    return otoc_series(s, i, i + o.offset, times);
}

struct LyapunovCell {
    double x_h = 0.0;
    std::optional<LyapunovFit> fit;
    std::string error; // non-empty: excluded from the regression
    bool within_bound = false;
    bool ok() const noexcept { return fit.has_value(); }
};

/// Bound line lambda_L = x_h / 2 with an allowance of three standard errors.
inline bool satisfies_bound(double x_h, const LyapunovFit& f)
{
    return f.lambda <= 0.5 * x_h * (1.0 + 3.0 * f.std_error);
}

struct LyapunovScan {
    std::vector<LyapunovCell> cells;
    std::optional<LineFit> regression; // 2 lambda_fit = a x_h + b over fitted cells
    std::size_t flagged() const
    {
        std::size_t n = 0;
        for (const auto& c : cells)
            n += c.ok() ? 0 : 1;
        return n;
    }
};

inline LyapunovScan lyapunov_scan(const std::vector<double>& x_h_list, const ChainConfig& c, const OtocSettings& o,
                                  int workers = 0)
{
    if (x_h_list.empty())
        throw ConfigError("lyapunov scan needs a non-empty x_h list");
    o.validate();
    const std::vector<double> times = time_grid(o.t_max, o.dt);
    LyapunovScan out;
    out.cells = parallel_map<LyapunovCell>(
        x_h_list.size(),
        [&](std::size_t k) {
            LyapunovCell cell;
            cell.x_h = x_h_list[k];
            try {
                const MetricProfile m(cell.x_h);
                const HoppingProfile kap = build_hoppings(m, c);
                const Spectrum s = spectral_data(build_hamiltonian(kap, c));
                cell.fit = fit_lyapunov(probe_series(s, kap, o, times), o.d_lo, o.d_hi);
                cell.within_bound = satisfies_bound(cell.x_h, *cell.fit);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            return cell;
        },
        workers);
    std::vector<double> x, y;
    for (const auto& cell : out.cells)
        if (cell.ok()) {
            x.push_back(cell.x_h);
            y.push_back(2.0 * cell.fit->lambda);
        }
    if (x.size() >= 2)
        out.regression = least_squares(x, y);
    return out;
}

/// Unit density at one site, the nested-commutator seed.
inline Eigen::MatrixXd density_probe(Eigen::Index sites, Eigen::Index site)
{
    if (site < 0 || site >= sites)
        throw SizeError("density probe site outside chain");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(sites, sites);
    w(site, site) = 1.0;
    return w;
}

struct CommutatorLadder {
    Eigen::MatrixXd w;
    std::vector<double> norms; // norms[k] for k = 0..k_max
};

inline double max_singular_value(const Eigen::MatrixXd& m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

/// M_0 = w, M_k = h M_{k-1} - M_{k-1} h; norms[k] = max singular value of M_k.
inline CommutatorLadder nested_commutator_norms(const SingleParticleHamiltonian& h, const Eigen::MatrixXd& w,
                                                int k_max)
{
    if (k_max < 1)
        throw DomainError("k_max must be >= 1");
    if (w.rows() != h.sites() || w.cols() != h.sites())
        throw SizeError("probe matrix and Hamiltonian dimensions differ");
    CommutatorLadder out{w, {}};
    out.norms.reserve(static_cast<std::size_t>(k_max) + 1);
    Eigen::MatrixXd m = w;
    out.norms.push_back(max_singular_value(m));
    for (int k = 1; k <= k_max; ++k) {
        Eigen::MatrixXd next = h.h * m;
        next.noalias() -= m * h.h;
        m.swap(next);
        out.norms.push_back(max_singular_value(m));
    }
    return out;
}

struct NestedRow {
    double x_ht = 0.0;
    int k = 0;
    double norm = 0.0;
};

/// Ladder at the chain center for each x_ht; rows are x_ht major, k = 1..k_max minor.
inline std::vector<NestedRow> nested_scan(const std::vector<double>& x_ht_list, const ChainConfig& c, int k_max,
                                          int workers = 0)
{
    if (x_ht_list.empty())
        throw ConfigError("nested scan needs a non-empty x_ht list");
    const auto ladders = parallel_map<std::vector<double>>(
        x_ht_list.size(),
        [&](std::size_t k) {
            const SingleParticleHamiltonian h = chain_hamiltonian(MetricProfile(x_ht_list[k]), c);
            return nested_commutator_norms(h, density_probe(h.sites(), h.sites() / 2), k_max).norms;
        },
        workers);
    std::vector<NestedRow> rows;
    for (std::size_t a = 0; a < x_ht_list.size(); ++a)
        for (int k = 1; k <= k_max; ++k)
            rows.push_back({x_ht_list[a], k, ladders[a][static_cast<std::size_t>(k)]});
    return rows;
}

} // namespace bhb

#endif // BHB_SCRAMBLING_HPP
