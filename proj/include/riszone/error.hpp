#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "riszone/config.hpp"
#include "riszone/field.hpp"
#include "riszone/rng.hpp"
#include "riszone/scenario.hpp"

namespace riszone {

// ---------------------------------------------------------------------------
// Position-error model
// ---------------------------------------------------------------------------

struct ErrorModel {
    Vec3 sigma{0, 0, 0};         // per-axis standard deviations, m
    std::uint64_t seed = 42;
};

/// Zero-mean Gaussian error for one trial; the (seed, trial) pair selects an
/// independent reproducible stream.
inline Point3 sample_error(const ErrorModel& model, std::uint64_t trial) {
    CounterRng rng(model.seed, trial);
    return {model.sigma.x * rng.next_gaussian(),
            model.sigma.y * rng.next_gaussian(),
            model.sigma.z * rng.next_gaussian()};
}

// ---------------------------------------------------------------------------
// Zone-boundary ellipsoid
// ---------------------------------------------------------------------------

struct EllipsoidParams {
    Point3 center{};          // midpoint of the foci (B frame)
    double beta = 0;          // tilt of the focal axis against the plane
    double l_a = 0, l_b = 0, l_c = 0;  // literal reference axes (documentation)
    double a_ex = 0, b_ex = 0;         // exact semi-axes used for computation
    double d = 0;                      // focal distance
};

/// Parameters of the i-th zone-boundary ellipsoid around Tx and the
/// (possibly erroneous) Rx estimate, both in B-frame coordinates.
inline EllipsoidParams ellipsoid_params(double zone_i, const Point3& tx_b,
                                        const Point3& rx_est_b, double lambda) {
    EllipsoidParams e;
    e.d = distance(tx_b, rx_est_b);
    if (!(e.d > 0)) throw std::domain_error("ellipsoid_params: coincident foci");
    e.center = (tx_b + rx_est_b) / 2.0;
    e.beta = std::atan((rx_est_b.z - tx_b.z) / (rx_est_b.x - tx_b.x));
    e.l_a = e.d + zone_i * lambda / 2.0;
    e.l_b = e.l_c = zone_i * lambda * e.d / 2.0;
    e.a_ex = (e.d + zone_i * lambda / 2.0) / 2.0;
    e.b_ex = std::sqrt(e.a_ex * e.a_ex - e.d * e.d / 4.0);
    return e;
}

/// Point on the exact ellipsoid at spherical parameters (nu, kappa), mapped
/// through the R_y(beta) tilt and the center offset.
inline Point3 ellipsoid_point(const EllipsoidParams& e, double nu, double kappa) {
    const Vec3 p{e.a_ex * std::sin(nu) * std::cos(kappa),
                 e.b_ex * std::sin(nu) * std::sin(kappa),
                 e.b_ex * std::cos(nu)};
    const double cb = std::cos(e.beta), sb = std::sin(e.beta);
    const Vec3 r{cb * p.x - sb * p.z, p.y, sb * p.x + cb * p.z};
    return e.center + r;
}

struct IntersectionShift {
    double dx = 0, dy = 0;
    bool ill_conditioned = false;   // |tan beta| > 10: x amplification blows up
};

/// Leading-order displacement of the zone/plane intersection under an Rx
/// position error: dx = (e_x + e_z tan(beta))/2, dy = e_y/2.
inline IntersectionShift predicted_intersection_shift(const Point3& err,
                                                      const FrameB& frame) {
    const double tan_beta =
        (frame.rx_b.z - frame.tx_b.z) / (frame.rx_b.x - frame.tx_b.x);
    IntersectionShift s;
    s.dx = (err.x + err.z * tan_beta) / 2.0;
    s.dy = err.y / 2.0;
    s.ill_conditioned = std::abs(tan_beta) > 10.0;
    return s;
}

// ---------------------------------------------------------------------------
// Monte-Carlo robustness harness
// ---------------------------------------------------------------------------

enum class Configurator { Tposj, Onebit, Continuous, Random };

inline const char* configurator_name(Configurator c) {
    switch (c) {
        case Configurator::Tposj: return "tposj";
        case Configurator::Onebit: return "onebit";
        case Configurator::Continuous: return "continuous";
        default: return "random";
    }
}

struct McStats {
    double mean = 0, stddev = 0, q05 = 0, q50 = 0, q95 = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> samples;   // per-trial SE, trial order
};

/// Configure against the erroneous Rx position, evaluate spectrum efficiency
/// at the true one. Trials are independent streams; results are aggregated in
/// trial order so thread count cannot change the output.
inline McStats monte_carlo_se(const Scenario& sc, Configurator cfg,
                              const ErrorModel& model, int trials,
                              int threads = 1) {
    if (trials < 1) throw std::invalid_argument("monte_carlo_se: trials >= 1");
    std::vector<double> se_vals(static_cast<std::size_t>(trials), 0.0);

    auto run_trial = [&](int t) {
        const Point3 err = sample_error(model, static_cast<std::uint64_t>(t));
        Scenario est = sc;
        est.rx = sc.rx + err;
        std::vector<ConfigMatrix> cfgs;
        switch (cfg) {
            case Configurator::Tposj:
                cfgs = tposj(est).panels;
                break;
            case Configurator::Onebit:
                for (std::size_t c = 0; c < sc.panels.size(); ++c)
                    cfgs.push_back(baseline_beamform(
                        est, static_cast<int>(c), BeamformResolution::OneBit));
                break;
            case Configurator::Continuous:
                for (std::size_t c = 0; c < sc.panels.size(); ++c)
                    cfgs.push_back(baseline_beamform(
                        est, static_cast<int>(c), BeamformResolution::Continuous));
                break;
            case Configurator::Random:
                for (std::size_t c = 0; c < sc.panels.size(); ++c)
                    cfgs.push_back(baseline_random(
                        sc.panels[c], sc.gamma_r,
                        model.seed ^ (0x9e37ULL + static_cast<std::uint64_t>(t) * 2654435761ULL + c),
                        sc.random_continuous));
                break;
        }
        se_vals[static_cast<std::size_t>(t)] =
            received_power_nlos(cfgs, sc).se_bps_hz;
    };

    threads = std::max(1, threads);
    if (threads == 1 || trials == 1) {
        for (int t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
                    run_trial(t);
            });
        for (auto& th : pool) th.join();
    }

    McStats st;
    st.trials = trials;
    st.seed = model.seed;
    st.samples = se_vals;
    double sum = 0, comp = 0;
    for (double v : se_vals) {  // compensated summation, fixed order
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    st.mean = sum / trials;
    double var = 0;
    for (double v : se_vals) var += (v - st.mean) * (v - st.mean);
    st.stddev = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
    std::vector<double> sorted = se_vals;
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double f) {
        const double pos = f * (trials - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= sorted.size()) return sorted.back();
        return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
    };
    st.q05 = q(0.05);
    st.q50 = q(0.50);
    st.q95 = q(0.95);
    return st;
}

}  // namespace riszone
