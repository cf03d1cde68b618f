#pragma once

#include <algorithm>
#include <cassert>
#include <complex>
#include <optional>
#include <vector>

#include "riszone/config.hpp"
#include "riszone/geometry.hpp"
#include "riszone/scenario.hpp"

namespace riszone {

// ---------------------------------------------------------------------------
// Antenna pattern
// ---------------------------------------------------------------------------

/// cos^q gain with q tied to the boresight gain by G(0) = 2(q+1).
/// Boresight gains implying q < 0 (below ~3 dBi) fall back to isotropic.
inline double cosq_gain(double theta, double boresight_gain_dbi) {
    const double g0 = db_to_linear(boresight_gain_dbi);
    const double q = g0 / 2.0 - 1.0;
    if (q < 0.0) return 1.0;
    if (theta > kPi / 2.0) return 0.0;
    return 2.0 * (q + 1.0) * std::pow(std::cos(theta), q);
}

// ---------------------------------------------------------------------------
// Element geometry
// ---------------------------------------------------------------------------

struct ElementAngles {
    double theta_i = 0, phi_i = 0;   // incident elevation/azimuth (panel frame)
    double theta_r = 0, phi_r = 0;   // reflected elevation/azimuth
    double theta_t = 0;              // off-boresight angle at the Tx
    double r_i0 = 0, r_r0 = 0;       // center distances Tx->elem, elem->Rx
    bool shadowed = false;           // Tx or Rx behind the panel
};

/// Angles and distances for one element center. `p_local`, `tx_local`,
/// `rx_local` are panel-local; `boresight` is the Tx main-lobe direction and
/// `tx_to_elem` the Tx->element direction, both unit vectors in any common
/// frame.
inline ElementAngles element_angles(const Point3& p_local, const Point3& tx_local,
                                    const Point3& rx_local, const Vec3& boresight,
                                    const Vec3& tx_to_elem) {
    ElementAngles a;
    const Vec3 vt = tx_local - p_local;
    const Vec3 vr = rx_local - p_local;
    a.r_i0 = vt.norm();
    a.r_r0 = vr.norm();
    a.shadowed = (tx_local.z <= 0.0) || (rx_local.z <= 0.0);
    const double ct = std::clamp(vt.z / a.r_i0, -1.0, 1.0);
    const double cr = std::clamp(vr.z / a.r_r0, -1.0, 1.0);
    a.theta_i = std::acos(ct);
    a.theta_r = std::acos(cr);
    a.phi_i = (std::abs(vt.x) + std::abs(vt.y) > 0) ? std::atan2(vt.y, vt.x) : 0.0;
    a.phi_r = (std::abs(vr.x) + std::abs(vr.y) > 0) ? std::atan2(vr.y, vr.x) : 0.0;
    a.theta_t = std::acos(std::clamp(boresight.dot(tx_to_elem), -1.0, 1.0));
    return a;
}

// ---------------------------------------------------------------------------
// Element field and received power
// ---------------------------------------------------------------------------

struct FieldContext {
    double tx_power_w = 1.0;     // per-antenna transmit power
    double lambda = 0.01;
    double elem_a = 0, elem_b = 0;
    double tx_gain_dbi = 15.0;   // cos^q boresight gain; <3 dBi -> isotropic
};

/// Scattered field of one element (scalar Kirchhoff form): amplitude from the
/// Friis field at the element, obliquity factor cos(theta_r) + cos(theta_i),
/// aperture sincs, spherical spreading on both legs.
inline cplx element_field(const ElementAngles& a, cplx coeff,
                          const FieldContext& ctx) {
    if (coeff == cplx{0.0, 0.0} || a.shadowed) return {0.0, 0.0};
    assert(a.r_i0 > 10.0 * fraunhofer_element(ctx.elem_a, ctx.elem_b, ctx.lambda));
    assert(a.r_r0 > 10.0 * fraunhofer_element(ctx.elem_a, ctx.elem_b, ctx.lambda));
    const double k = 2.0 * kPi / ctx.lambda;
    const double gt = cosq_gain(a.theta_t, ctx.tx_gain_dbi);
    const double amp = std::sqrt(kEta0 * ctx.tx_power_w * gt / (2.0 * kPi));
    const double kf = std::cos(a.theta_r) + std::cos(a.theta_i);
    const double ax = std::sin(a.theta_i) * std::cos(a.phi_i) +
                      std::sin(a.theta_r) * std::cos(a.phi_r);
    const double ay = std::sin(a.theta_i) * std::sin(a.phi_i) +
                      std::sin(a.theta_r) * std::sin(a.phi_r);
    const double sincs =
        sinc(k * ctx.elem_a * ax / 2.0) * sinc(k * ctx.elem_b * ay / 2.0);
    const double phase = -k * (a.r_i0 + a.r_r0);
    const cplx osc{std::cos(phase), std::sin(phase)};
    const double mag = amp * kf * ctx.elem_a * ctx.elem_b * sincs /
                       (2.0 * ctx.lambda * a.r_i0 * a.r_r0);
    return mag * osc / cplx{0.0, 1.0};
}

struct PowerResult {
    cplx field{0.0, 0.0};
    double power_w = 0.0;
    double se_bps_hz = 0.0;
    int shadowed_elements = 0;
    // per panel, row-major element contributions (on request)
    std::optional<std::vector<std::vector<cplx>>> per_element;
};

inline double spectrum_efficiency(double power_w, double noise_w) {
    if (!(noise_w > 0)) throw std::domain_error("noise power must be positive");
    return std::log2(1.0 + power_w / noise_w);
}

namespace detail {

struct KahanCplx {
    cplx sum{0, 0}, c{0, 0};
    void add(cplx v) {
        const cplx y = v - c;
        const cplx t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

inline Vec3 boresight_direction(const Scenario& sc, const Point3& tx) {
    const Point3 target = sc.panels.at(sc.boresight_panel).pose.origin;
    return (target - tx).normalized();
}

}  // namespace detail

/// Coherent sum of all element fields over all panels and Tx antennas (total
/// transmit power split evenly across antennas), converted to received power
/// through the isotropic-receiver aperture. Summation order is fixed and
/// compensated, so results are reproducible bit-for-bit.
inline PowerResult received_power_nlos(const std::vector<ConfigMatrix>& cfgs,
                                       const Scenario& sc,
                                       bool keep_per_element = false) {
    if (cfgs.size() != sc.panels.size())
        throw std::invalid_argument("received_power_nlos: one config per panel");
    PowerResult out;
    const double lambda = sc.wavelength();
    detail::KahanCplx acc;
    if (keep_per_element)
        out.per_element.emplace(sc.panels.size());
    FieldContext ctx;
    ctx.tx_power_w = sc.tx_power_w() / sc.tx_antennas.size();
    ctx.lambda = lambda;
    ctx.tx_gain_dbi = sc.tx_boresight_gain_dbi;
    for (std::size_t b = 0; b < sc.tx_antennas.size(); ++b) {
        const Point3& tx = sc.tx_antennas[b];
        const Vec3 bs = detail::boresight_direction(sc, tx);
        for (std::size_t c = 0; c < sc.panels.size(); ++c) {
            const PanelSpec& panel = sc.panels[c];
            ctx.elem_a = panel.elem_a;
            ctx.elem_b = panel.elem_b;
            const Point3 tx_l = panel.pose.to_local(tx);
            const Point3 rx_l = panel.pose.to_local(sc.rx);
            if (keep_per_element && b == 0)
                (*out.per_element)[c].assign(
                    static_cast<std::size_t>(panel.rows) * panel.cols, cplx{0, 0});
            for (int m = 1; m <= panel.rows; ++m)
                for (int n = 1; n <= panel.cols; ++n) {
                    const Point3 pl = panel.element_center_local(m, n);
                    const Point3 pw = panel.pose.from_local(pl);
                    const ElementAngles a = element_angles(
                        pl, tx_l, rx_l, bs, (pw - tx).normalized());
                    if (a.shadowed) {
                        ++out.shadowed_elements;
                        continue;
                    }
                    const cplx e = element_field(a, cfgs[c].at(m, n), ctx);
                    acc.add(e);
                    if (keep_per_element)
                        (*out.per_element)[c][static_cast<std::size_t>(m - 1) *
                                                  panel.cols +
                                              (n - 1)] += e;
                }
        }
    }
    out.field = acc.sum;
    const double ae = lambda * lambda / (4.0 * kPi);  // isotropic receiver
    out.power_w = std::norm(out.field) * ae / (2.0 * kEta0);
    out.se_bps_hz = spectrum_efficiency(out.power_w, sc.noise_w());
    return out;
}

/// As above plus the Friis direct-path field from each antenna.
inline PowerResult received_power_los(const std::vector<ConfigMatrix>& cfgs,
                                      const Scenario& sc,
                                      bool keep_per_element = false) {
    PowerResult out = received_power_nlos(cfgs, sc, keep_per_element);
    detail::KahanCplx acc;
    acc.add(out.field);
    const double k = sc.wavenumber();
    const double pt_b = sc.tx_power_w() / sc.tx_antennas.size();
    for (const auto& tx : sc.tx_antennas) {
        const double rd = distance(tx, sc.rx);
        const Vec3 bs = detail::boresight_direction(sc, tx);
        const double theta_d =
            std::acos(std::clamp(bs.dot((sc.rx - tx).normalized()), -1.0, 1.0));
        const double gt = cosq_gain(theta_d, sc.tx_boresight_gain_dbi);
        const double amp = std::sqrt(kEta0 * pt_b * gt / (2.0 * kPi)) / rd;
        acc.add(amp * cplx{std::cos(-k * rd), std::sin(-k * rd)});
    }
    out.field = acc.sum;
    const double lambda = sc.wavelength();
    const double ae = lambda * lambda / (4.0 * kPi);
    out.power_w = std::norm(out.field) * ae / (2.0 * kEta0);
    out.se_bps_hz = spectrum_efficiency(out.power_w, sc.noise_w());
    return out;
}

}  // namespace riszone
