#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riszone/geometry.hpp"
#include "riszone/rng.hpp"
#include "riszone/scenario.hpp"

namespace riszone {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Element coefficients
// ---------------------------------------------------------------------------

enum class ElementState { ReflectOn, ReflectOff, Absorb };

/// Ternary element coefficient: +Gamma_r, -Gamma_r, or exactly 0 (absorption,
/// impedance matched).
struct ElementCoefficient {
    ElementState state = ElementState::Absorb;
    double gamma_r = 0.0;

    cplx value() const {
        switch (state) {
            case ElementState::ReflectOn: return {gamma_r, 0.0};
            case ElementState::ReflectOff: return {-gamma_r, 0.0};
            default: return {0.0, 0.0};
        }
    }
};

/// Reflection coefficient of an element with input impedance z_in against the
/// free-space impedance.
inline cplx reflection_coefficient(cplx z_in, double eta0 = kEta0) {
    const cplx den = z_in + eta0;
    if (std::abs(den) < 1e-9 * eta0)
        throw std::domain_error("reflection_coefficient: resonant denominator");
    return (z_in - eta0) / den;
}

enum class Provenance { Tposj, Random, Onebit, Continuous };

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Tposj: return "tposj";
        case Provenance::Random: return "random";
        case Provenance::Onebit: return "onebit";
        default: return "continuous";
    }
}

/// M x N grid of element coefficients. Ternary provenances store only values
/// in {+Gamma_r, -Gamma_r, 0}; the continuous baseline stores arbitrary
/// phases of magnitude Gamma_r.
class ConfigMatrix {
  public:
    ConfigMatrix() = default;
    ConfigMatrix(int rows, int cols, Provenance prov, double gamma_r)
        : rows_(rows), cols_(cols), prov_(prov), gamma_r_(gamma_r),
          data_(static_cast<std::size_t>(rows) * cols, cplx{0.0, 0.0}) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Provenance provenance() const { return prov_; }
    double gamma_r() const { return gamma_r_; }

    cplx& at(int m, int n) { return data_[static_cast<std::size_t>(m - 1) * cols_ + (n - 1)]; }
    const cplx& at(int m, int n) const {
        return data_[static_cast<std::size_t>(m - 1) * cols_ + (n - 1)];
    }
    const std::vector<cplx>& raw() const { return data_; }
    std::vector<cplx>& raw() { return data_; }

    int count_reflecting() const {
        int c = 0;
        for (const auto& v : data_)
            if (std::abs(v) > 0) ++c;
        return c;
    }

    /// Text grid: one row per panel row; '+', '-', '.' per element.
    std::string to_text_grid() const {
        std::string out;
        out.reserve(static_cast<std::size_t>(rows_) * (cols_ + 1));
        for (int m = 1; m <= rows_; ++m) {
            for (int n = 1; n <= cols_; ++n) {
                const cplx v = at(m, n);
                if (std::abs(v) == 0.0) out += '.';
                else out += (v.real() >= 0.0 ? '+' : '-');
            }
            out += '\n';
        }
        return out;
    }

  private:
    int rows_ = 0, cols_ = 0;
    Provenance prov_ = Provenance::Tposj;
    double gamma_r_ = 0.0;
    std::vector<cplx> data_;
};

// ---------------------------------------------------------------------------
// TPOSJ pipeline
// ---------------------------------------------------------------------------

struct ZoneBand {
    long long i = 1;     // zone index
    double xi = 0.0;     // judgement threshold, m
    double tau = 0.5;    // band fraction behind xi
};

struct InfeasibleThresholdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Geometry of one (tx antenna, panel) pair: the auxiliary frame built inside
/// the panel-local frame, plus per-element coordinates and seeds.
struct PairGeometry {
    FrameB frame;
    double lambda = 0;
    std::vector<Point3> elem_b;      // element centers in the B frame
    std::vector<double> frac_idx;    // fractional zone index per element
    std::vector<double> axial_t;     // axial parameter per element
    double t_lo = 0, t_hi = 0;       // panel axial window (with margin)

    PairGeometry(const PanelSpec& panel, const Point3& tx_world,
                 const Point3& rx_world, double lam) {
        lambda = lam;
        const Point3 tx_l = panel.pose.to_local(tx_world);
        const Point3 rx_l = panel.pose.to_local(rx_world);
        frame = build_b_frame(tx_l, rx_l);
        const int M = panel.rows, N = panel.cols;
        elem_b.reserve(static_cast<std::size_t>(M) * N);
        frac_idx.reserve(elem_b.capacity());
        axial_t.reserve(elem_b.capacity());
        const Vec3 u = (frame.tx_b - frame.rx_b) / frame.d;
        double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
        for (int m = 1; m <= M; ++m)
            for (int n = 1; n <= N; ++n) {
                const Point3 pb = frame.to_b(panel.element_center_local(m, n));
                elem_b.push_back(pb);
                frac_idx.push_back(
                    frac_zone_index(pb, frame.tx_b, frame.rx_b, lambda));
                const double t = (pb - frame.rx_b).dot(u);
                axial_t.push_back(t);
                tmin = std::min(tmin, t);
                tmax = std::max(tmax, t);
            }
        const double margin =
            0.05 + 2.0 * std::max(panel.elem_a, panel.elem_b) + 0.02 * (tmax - tmin);
        t_lo = tmin - margin;
        t_hi = tmax + margin;
    }

    double fmin() const { return *std::min_element(frac_idx.begin(), frac_idx.end()); }
    double fmax() const { return *std::max_element(frac_idx.begin(), frac_idx.end()); }
};

}  // namespace detail

/// Judgement threshold: the largest gap between the i-th and (i+tau)-th zone
/// curves, maximized over the candidate zones and the axial window where the
/// curves actually cross the panel (>= 512 axial samples per zone plus local
/// refinement).
inline double threshold_xi(const FrameB& frame, double tau,
                           const std::vector<long long>& candidate_zones,
                           double lambda, double t_lo, double t_hi,
                           int grid_n = 512) {
    if (!(tau > 0.0 && tau <= 0.5))
        throw std::domain_error("threshold_xi: tau must lie in (0, 0.5]");
    if (candidate_zones.empty())
        throw std::domain_error("threshold_xi: no candidate zones");
    double best = -1.0;
    for (long long i : candidate_zones) {
        if (i < 1) continue;
        detail::ZoneConic inner(frame, static_cast<double>(i), lambda, true);
        detail::ZoneConic outer(frame, static_cast<double>(i) + tau, lambda, true);
        auto win = inner.feasible_t();
        if (!win) continue;
        double lo = std::max(t_lo, (*win)[0] + 1e-12);
        double hi = std::min(t_hi, (*win)[1] - 1e-12);
        if (!(hi > lo)) continue;
        auto neg_gap = [&](double t) {
            auto vi = inner.point(t);
            auto vo = outer.point(t);
            if (!vi || !vo) return std::numeric_limits<double>::infinity();
            return -((*vo)[1] - (*vi)[1]);
        };
        const double t_best = grid_golden_minimize(neg_gap, lo, hi, grid_n, 1e-9);
        const double gap = -neg_gap(t_best);
        if (std::isfinite(gap)) best = std::max(best, gap);
    }
    if (best < 0)
        throw InfeasibleThresholdError(
            "threshold_xi: no candidate zone crosses the panel window");
    return best;
}

/// Candidate zone indices seeded from the panel's corner and center fractional
/// indices (floor/ceil +- 2), clamped to i >= 1.
inline std::vector<long long> seed_candidate_zones(const detail::PairGeometry& g,
                                                   const PanelSpec& panel) {
    std::vector<double> probes;
    for (const auto& c : panel.corner_elements_local())
        probes.push_back(frac_zone_index(g.frame.to_b(c), g.frame.tx_b,
                                         g.frame.rx_b, g.lambda));
    probes.push_back(frac_zone_index(g.frame.to_b({0, 0, 0}), g.frame.tx_b,
                                     g.frame.rx_b, g.lambda));
    std::vector<long long> zones;
    for (double f : probes) {
        const long long base = static_cast<long long>(std::floor(f));
        for (long long off = -2; off <= 3; ++off)
            if (base + off >= 1) zones.push_back(base + off);
    }
    std::sort(zones.begin(), zones.end());
    zones.erase(std::unique(zones.begin(), zones.end()), zones.end());
    return zones;
}

/// Inclusive zone-index range whose curves pass within xi of the panel:
/// lower bound witnessed by any element, upper bound by one of the four
/// outermost corner elements. Search is seeded by the elements' fractional
/// indices; empty when no curve comes near the panel.
inline std::optional<std::pair<long long, long long>> zone_bounds(
    const detail::PairGeometry& g, const PanelSpec& panel, double xi) {
    const double fmin = g.fmin(), fmax = g.fmax();
    // xi in index units, from the steepest possible path-length gradient (2).
    const long long pad = 2 + static_cast<long long>(std::ceil(4.0 * xi / g.lambda));
    const long long lo_seed = std::max<long long>(
        1, static_cast<long long>(std::floor(fmin)) - pad);
    const long long hi_seed =
        static_cast<long long>(std::ceil(fmax)) + pad;

    auto any_element_within = [&](long long i, bool corners_only) {
        if (corners_only) {
            for (const auto& c : panel.corner_elements_local()) {
                const Point3 pb = g.frame.to_b(c);
                if (min_distance_to_zone_curve_windowed(pb, g.frame, double(i),
                                                        g.lambda, g.t_lo,
                                                        g.t_hi) <= xi)
                    return true;
            }
            return false;
        }
        for (std::size_t k = 0; k < g.elem_b.size(); ++k) {
            if (std::abs(g.frac_idx[k] - double(i)) > double(pad) + 1.0) continue;
            if (min_distance_to_zone_curve_windowed(g.elem_b[k], g.frame,
                                                    double(i), g.lambda, g.t_lo,
                                                    g.t_hi) <= xi)
                return true;
        }
        return false;
    };

    std::optional<long long> il, iu;
    for (long long i = lo_seed; i <= hi_seed; ++i)
        if (any_element_within(i, false)) { il = i; break; }
    if (!il) return std::nullopt;
    for (long long i = hi_seed; i >= *il; --i)
        if (any_element_within(i, true)) { iu = i; break; }
    if (!iu) iu = il;  // the witnessing element was not a corner one
    return std::make_pair(*il, *iu);
}

/// Single-zone judgement of one element center (B-frame coordinates).
inline ElementCoefficient judge_element(const Point3& p_b, const FrameB& frame,
                                        const ZoneBand& band, double lambda,
                                        double gamma_r) {
    const double dist =
        min_distance_to_zone_curve(p_b, frame, double(band.i), lambda);
    ElementCoefficient c;
    c.gamma_r = gamma_r;
    if (dist <= band.xi)
        c.state = (band.i % 2 != 0) ? ElementState::ReflectOn
                                    : ElementState::ReflectOff;
    else
        c.state = ElementState::Absorb;
    return c;
}

/// Per-zone configuration matrix (applies the judgement to every element).
inline ConfigMatrix zone_matrix(const FrameB& frame, const PanelSpec& panel,
                                const ZoneBand& band, double lambda,
                                double gamma_r) {
    ConfigMatrix out(panel.rows, panel.cols, Provenance::Tposj, gamma_r);
    for (int m = 1; m <= panel.rows; ++m)
        for (int n = 1; n <= panel.cols; ++n) {
            const Point3 pb = frame.to_b(panel.element_center_local(m, n));
            out.at(m, n) = judge_element(pb, frame, band, lambda, gamma_r).value();
        }
    return out;
}

namespace detail {

/// Upsilon step composition: eps(t - g) - eps(-g - t) with eps(0) = 1,
/// scaled back by gamma_r. Tiny tolerance absorbs float summation noise on
/// exact multiples of gamma_r.
inline cplx upsilon(double t, double gamma_r) {
    const double tol = 1e-9 * std::max(gamma_r, 1.0);
    if (t >= gamma_r - tol) return {gamma_r, 0.0};
    if (t <= -gamma_r + tol) return {-gamma_r, 0.0};
    return {0.0, 0.0};
}

}  // namespace detail

/// Element-wise sum of per-zone matrices pushed through the ternary step.
inline ConfigMatrix aggregate(const std::vector<ConfigMatrix>& per_zone) {
    if (per_zone.empty()) throw std::invalid_argument("aggregate: empty input");
    const int M = per_zone.front().rows(), N = per_zone.front().cols();
    const double g = per_zone.front().gamma_r();
    ConfigMatrix out(M, N, Provenance::Tposj, g);
    for (const auto& z : per_zone) {
        if (z.rows() != M || z.cols() != N)
            throw std::invalid_argument("aggregate: shape mismatch");
    }
    for (int m = 1; m <= M; ++m)
        for (int n = 1; n <= N; ++n) {
            double t = 0.0;
            for (const auto& z : per_zone) t += z.at(m, n).real();
            out.at(m, n) = detail::upsilon(t, g);
        }
    return out;
}

struct TposjResult {
    std::vector<ConfigMatrix> panels;
    std::uint64_t judgement_evals = 0;   // distance-test count, for complexity checks
    std::vector<double> xi_per_pair;     // resolved threshold per (antenna, panel)
    std::vector<std::pair<long long, long long>> bounds_per_pair;
};

/// Full position-only configuration: per (antenna, panel) pair build the
/// frame, resolve the threshold, bound the zone range, judge every element
/// against its nearby zone curves and aggregate; antennas then combine through
/// the same ternary step. Deterministic.
inline TposjResult tposj(const Scenario& sc) {
    TposjResult res;
    const double lambda = sc.wavelength();
    for (const auto& panel : sc.panels) {
        std::vector<ConfigMatrix> per_antenna;
        for (const auto& tx : sc.tx_antennas) {
            detail::PairGeometry g(panel, tx, sc.rx, lambda);
            const auto zones = seed_candidate_zones(g, panel);
            double xi;
            if (sc.fixed_xi_m) {
                xi = *sc.fixed_xi_m;
            } else {
                xi = threshold_xi(g.frame, sc.tau, zones, lambda, g.t_lo, g.t_hi);
            }
            ConfigMatrix cfg(panel.rows, panel.cols, Provenance::Tposj, sc.gamma_r);
            auto bounds = zone_bounds(g, panel, xi);
            res.xi_per_pair.push_back(xi);
            if (!bounds) {
                res.bounds_per_pair.emplace_back(0, -1);
                per_antenna.push_back(std::move(cfg));  // all-absorb
                continue;
            }
            res.bounds_per_pair.push_back(*bounds);
            const long long pad =
                2 + static_cast<long long>(std::ceil(4.0 * xi / lambda));
            const std::size_t count = g.elem_b.size();
            for (std::size_t k = 0; k < count; ++k) {
                const long long near_i =
                    static_cast<long long>(std::llround(g.frac_idx[k]));
                double t = 0.0;
                for (long long i = near_i - pad; i <= near_i + pad; ++i) {
                    if (i < bounds->first || i > bounds->second) continue;
                    const double dist = min_distance_to_zone_curve_windowed(
                        g.elem_b[k], g.frame, double(i), lambda,
                        g.axial_t[k] - 0.05 - 4.0 * xi,
                        g.axial_t[k] + 0.05 + 4.0 * xi);
                    ++res.judgement_evals;
                    if (dist <= xi) t += (i % 2 != 0) ? sc.gamma_r : -sc.gamma_r;
                }
                cfg.raw()[k] = detail::upsilon(t, sc.gamma_r);
            }
            per_antenna.push_back(std::move(cfg));
        }
        res.panels.push_back(aggregate(per_antenna));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// 1-bit random configuration: each element independently +-Gamma_r with
/// probability 1/2 (continuous-uniform phases behind a flag).
inline ConfigMatrix baseline_random(const PanelSpec& panel, double gamma_r,
                                    std::uint64_t seed,
                                    bool continuous_phases = false) {
    ConfigMatrix out(panel.rows, panel.cols,
                     continuous_phases ? Provenance::Continuous : Provenance::Random,
                     gamma_r);
    CounterRng rng(seed, 0x72616e646f6dULL);
    for (auto& v : out.raw()) {
        if (continuous_phases) {
            const double psi = 2.0 * kPi * rng.next_double();
            v = gamma_r * cplx{std::cos(psi), std::sin(psi)};
        } else {
            v = {rng.next_bool() ? gamma_r : -gamma_r, 0.0};
        }
    }
    return out;
}

enum class BeamformResolution { OneBit, Continuous };

/// Position-based beamforming baseline: per element the desired phase is
/// phi_ref + k(r_i + r_r); continuous applies it exactly, onebit snaps to the
/// nearer of {0, pi} (ties -> 0). phi_ref anchors to the direct-path phase
/// k*r_d when a direct link exists, else 0.
inline ConfigMatrix baseline_beamform(const Scenario& sc, int panel_index,
                                      BeamformResolution res, bool los = false,
                                      const Point3* rx_override = nullptr) {
    const PanelSpec& panel = sc.panels.at(panel_index);
    const Point3 tx = sc.tx_antennas.front();
    const Point3 rx = rx_override ? *rx_override : sc.rx;
    const double k = sc.wavenumber();
    const double phi_ref = los ? k * distance(tx, rx) : 0.0;
    ConfigMatrix out(panel.rows, panel.cols,
                     res == BeamformResolution::OneBit ? Provenance::Onebit
                                                       : Provenance::Continuous,
                     sc.gamma_r);
    for (int m = 1; m <= panel.rows; ++m)
        for (int n = 1; n <= panel.cols; ++n) {
            const Point3 p = panel.pose.from_local(panel.element_center_local(m, n));
            const double psi =
                std::fmod(phi_ref + k * (distance(tx, p) + distance(p, rx)),
                          2.0 * kPi);
            if (res == BeamformResolution::Continuous) {
                out.at(m, n) = sc.gamma_r * cplx{std::cos(psi), std::sin(psi)};
            } else {
                const double w = psi < 0 ? psi + 2.0 * kPi : psi;
                const double d0 = std::min(w, 2.0 * kPi - w);
                const double dpi = std::abs(w - kPi);
                const double q = (dpi < d0) ? kPi : 0.0;
                out.at(m, n) = {q == 0.0 ? sc.gamma_r : -sc.gamma_r, 0.0};
            }
        }
    return out;
}

}  // namespace riszone
