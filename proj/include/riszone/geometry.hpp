#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "riszone/math.hpp"

namespace riszone {

using Point3 = Vec3;

/// Tx and Rx project to the same ground point: the auxiliary frame (and with
/// it the whole zone construction) is undefined.
struct DegenerateFrameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No feasible zone/threshold geometry for the requested inputs.
struct InfeasibleGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Panels
// ---------------------------------------------------------------------------

/// Rigid pose of a panel: origin plus orthonormal axes (rows of `orientation`
/// are the panel x/y/z axes expressed in world coordinates; z is the surface
/// normal, the illuminated side is local z > 0).
struct PanelPose {
    Point3 origin{};
    Mat3 orientation{};

    Point3 to_local(const Point3& p) const { return orientation.apply(p - origin); }
    Point3 from_local(const Point3& q) const {
        return origin + orientation.apply_transposed(q);
    }
};

struct PanelSpec {
    int rows = 1;      // M, along local x
    int cols = 1;      // N, along local y
    double elem_a = 0; // element size along x, m
    double elem_b = 0; // element size along y, m
    PanelPose pose{};

    void validate() const {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("panel: rows and cols must be >= 1");
        if (!(elem_a > 0) || !(elem_b > 0))
            throw std::invalid_argument("panel: element sizes must be positive");
        if (pose.orientation.orthonormality_defect() > 1e-12)
            throw std::invalid_argument("panel: orientation matrix not orthonormal");
        if (!pose.origin.finite())
            throw std::invalid_argument("panel: non-finite origin");
    }

    /// Center of element (m, n), 1-based, in panel-local coordinates.
    Point3 element_center_local(int m, int n) const {
        return {(2.0 * m - rows - 1) / 2.0 * elem_a,
                (2.0 * n - cols - 1) / 2.0 * elem_b, 0.0};
    }

    /// The four outermost corner element centers (local coordinates).
    std::array<Point3, 4> corner_elements_local() const {
        const double hx = elem_a * (rows - 1) / 2.0;
        const double hy = elem_b * (cols - 1) / 2.0;
        return {Point3{-hx, -hy, 0}, Point3{-hx, hy, 0}, Point3{hx, -hy, 0},
                Point3{hx, hy, 0}};
    }

    double aperture_x() const { return rows * elem_a; }
    double aperture_y() const { return cols * elem_b; }
    double aperture_diagonal() const {
        return std::hypot(aperture_x(), aperture_y());
    }
};

// ---------------------------------------------------------------------------
// Fraunhofer distances
// ---------------------------------------------------------------------------

/// Far-field boundary of a single a x b element; the maximum element length is
/// its diagonal.
inline double fraunhofer_element(double a, double b, double lambda) {
    if (!(a > 0) || !(b > 0) || !(lambda > 0))
        throw std::domain_error("fraunhofer_element: inputs must be positive");
    const double d2 = a * a + b * b;
    return 2.0 * kPi * d2 / lambda;
}

/// Far-field boundary of the whole M*a x N*b aperture.
inline double fraunhofer_array(const PanelSpec& panel, double lambda) {
    panel.validate();
    if (!(lambda > 0))
        throw std::domain_error("fraunhofer_array: lambda must be positive");
    const double diag = panel.aperture_diagonal();
    return 2.0 * kPi * diag * diag / lambda;
}

// ---------------------------------------------------------------------------
// Auxiliary frame
// ---------------------------------------------------------------------------

/// Frame with origin at the receiver's ground projection and x-axis along the
/// ground projection of the Rx->Tx line. In it the receiver is (0, 0, z_r) and
/// the transmitter (x_t, ~0, z_t) with x_t > 0.
struct FrameB {
    double chi = 0;   // rotation angle between world x-axis and frame x-axis
    Point3 tx_b{};
    Point3 rx_b{};
    double d = 0;     // |Tx - Rx|
    Point3 ground_offset{};  // world-frame translation removed before rotating

    Point3 to_b(const Point3& p) const {
        const Point3 q = p - ground_offset;
        const double c = std::cos(chi), s = std::sin(chi);
        return {c * q.x + s * q.y, -s * q.x + c * q.y, q.z};
    }
    Point3 from_b(const Point3& p) const {
        const double c = std::cos(chi), s = std::sin(chi);
        return Point3{c * p.x - s * p.y, s * p.x + c * p.y, p.z} + ground_offset;
    }
};

inline FrameB build_b_frame(const Point3& tx, const Point3& rx) {
    const double gx = tx.x - rx.x, gy = tx.y - rx.y;
    const double ground = std::hypot(gx, gy);
    const double scale = std::max({std::abs(tx.z), std::abs(rx.z), (tx - rx).norm()});
    if (!(ground > 1e-12 * std::max(scale, 1.0)))
        throw DegenerateFrameError(
            "tx and rx share a ground projection; zone curve undefined");
    FrameB f;
    f.chi = std::atan2(gy, gx);
    f.ground_offset = {rx.x, rx.y, 0.0};
    f.tx_b = f.to_b(tx);
    f.rx_b = f.to_b(rx);
    f.d = (tx - rx).norm();
    return f;
}

// ---------------------------------------------------------------------------
// Fresnel zone geometry
// ---------------------------------------------------------------------------

/// Radius of the i-th zone boundary at axial split d1/d2 (quadratic
/// wavefront approximation; valid for d1, d2 >> lambda and radius << d1, d2).
inline double fresnel_radius(double i, double d1, double d2, double lambda) {
    if (!(i >= 1) || !(d1 > 0) || !(d2 > 0) || !(lambda > 0))
        throw std::domain_error("fresnel_radius: inputs out of domain");
    return std::sqrt(i * lambda * d1 * d2 / (d1 + d2));
}

struct Theorem1Lengths {
    double pq = 0;   // drop from the axis point to the panel plane, in-plane
    double rbq = 0;  // x-coordinate of the foot point
};

/// Closed-form lengths |PQ| and |R_bot Q| for the perpendicular construction
/// at axial parameter d1. Requires z_t != z_r for rbq.
inline Theorem1Lengths theorem1_lengths(const FrameB& f, double d1) {
    if (!(d1 > 0) || !(d1 < f.d))
        throw std::domain_error("theorem1_lengths: d1 must lie in (0, d)");
    const double zr = f.rx_b.z, zt = f.tx_b.z, xt = f.tx_b.x;
    const double d2 = f.d - d1;
    Theorem1Lengths out;
    out.pq = (zr * d2 + zt * d1) / std::abs(xt);
    if (zt == zr)
        throw std::domain_error(
            "theorem1_lengths: z_t == z_r (parallel lines); use the exact "
            "intersection path");
    out.rbq = ((zr * d2 + zt * d1) * f.d - zr * xt * xt) /
              (std::abs(zt - zr) * std::abs(xt));
    return out;
}

struct ZoneCurvePoint {
    double d1 = 0;       // axial curve parameter, distance from Rx along the link
    Point3 v{};          // intersection point, z = 0 in the panel frame
    int branch = +1;     // +1 -> +y, -1 -> -y
};

namespace detail {

/// One zone boundary intersected with the panel plane, parametrized by the
/// axial coordinate t measured from Rx along the link axis. `exact` uses the
/// true ellipsoid cross-section radius; otherwise the quadratic-wavefront
/// radius of the closed form. Both share the same foot-point construction.
struct ZoneConic {
    double d = 0, ux = 0, uz = 0, zr = 0;
    bool exact = false;
    double b2 = 0, a2 = 0;   // exact cross-section shape
    double il_over_d = 0;    // approx: i*lambda/d

    ZoneConic(const FrameB& f, double zone_i, double lambda, bool exact_form)
        : d(f.d), exact(exact_form) {
        const double xt = f.tx_b.x;
        ux = xt / d;
        uz = (f.tx_b.z - f.rx_b.z) / d;
        zr = f.rx_b.z;
        if (exact) {
            const double a = (d + zone_i * lambda / 2.0) / 2.0;
            a2 = a * a;
            b2 = a2 - d * d / 4.0;
        } else {
            il_over_d = zone_i * lambda / d;
        }
    }

    double rho2(double t) const {
        if (exact) {
            const double w = t - d / 2.0;
            return b2 * (1.0 - w * w / a2);
        }
        return il_over_d * t * (d - t);
    }

    /// Signed drop of the cross-section center, projected into the plane.
    double h(double t) const { return (zr + t * uz) / ux; }

    std::optional<std::array<double, 2>> point(double t) const {
        const double hh = h(t);
        const double rad = rho2(t) - hh * hh;
        if (rad < 0) return std::nullopt;
        return std::array<double, 2>{t * ux + hh * uz, std::sqrt(rad)};
    }

    /// Interval of t where the curve meets the plane (rho^2 >= h^2). The
    /// difference is a concave quadratic, so the feasible set is one interval.
    std::optional<std::array<double, 2>> feasible_t() const {
        double A, B, C;
        const double iux2 = 1.0 / (ux * ux);
        if (exact) {
            A = -b2 / a2 - uz * uz * iux2;
            B = b2 * d / a2 - 2.0 * zr * uz * iux2;
            C = b2 * (1.0 - d * d / (4.0 * a2)) - zr * zr * iux2;
        } else {
            A = -il_over_d - uz * uz * iux2;
            B = il_over_d * d - 2.0 * zr * uz * iux2;
            C = -zr * zr * iux2;
        }
        const double disc = B * B - 4.0 * A * C;
        if (disc <= 0) return std::nullopt;
        const double sq = std::sqrt(disc);
        // A < 0: roots ordered as [(-B + sq)/(2A), (-B - sq)/(2A)]
        return std::array<double, 2>{(-B + sq) / (2.0 * A), (-B - sq) / (2.0 * A)};
    }

    /// Distance from in-plane point p to the curve point at t (nearer of the
    /// two y-branches; the curve is mirror-symmetric in y).
    double dist_to(const Point3& p, double t) const {
        auto v = point(t);
        if (!v) return std::numeric_limits<double>::infinity();
        return std::hypot(p.x - (*v)[0], std::abs(p.y) - (*v)[1]);
    }
};

inline bool degenerate_heights(const FrameB& f) {
    return std::abs(f.tx_b.z - f.rx_b.z) <=
           1e-12 * std::max({std::abs(f.tx_b.z), std::abs(f.rx_b.z), 1.0});
}

}  // namespace detail

/// Closed-form intersection of the i-th zone boundary with the panel plane at
/// axial parameter d1. Returns both +-y branch points, or nothing when the
/// radicand is negative. Equal Tx/Rx heights fall back to the exact
/// ellipsoid-plane path (the closed form's foot-point ratio degenerates).
inline std::vector<ZoneCurvePoint> zone_plane_intersection(const FrameB& f,
                                                           double zone_i,
                                                           double d1,
                                                           double lambda) {
    if (!(zone_i >= 1)) throw std::domain_error("zone index must be >= 1");
    if (!(d1 > 0) || !(d1 < f.d))
        throw std::domain_error("zone_plane_intersection: d1 must lie in (0, d)");
    const bool exact = detail::degenerate_heights(f);
    detail::ZoneConic conic(f, zone_i, lambda, exact);
    auto v = conic.point(d1);
    if (!v) return {};
    std::vector<ZoneCurvePoint> out(2);
    out[0] = {d1, {(*v)[0], (*v)[1], 0.0}, +1};
    out[1] = {d1, {(*v)[0], -(*v)[1], 0.0}, -1};
    return out;
}

/// Exact ellipsoid-plane intersection at axial parameter t; same construction
/// as the closed form with the true cross-section radius. Valid for any zone
/// order and for z_t == z_r.
inline std::vector<ZoneCurvePoint> zone_plane_intersection_exact(const FrameB& f,
                                                                 double zone_i,
                                                                 double t,
                                                                 double lambda) {
    detail::ZoneConic conic(f, zone_i, lambda, true);
    auto v = conic.point(t);
    if (!v) return {};
    std::vector<ZoneCurvePoint> out(2);
    out[0] = {t, {(*v)[0], (*v)[1], 0.0}, +1};
    out[1] = {t, {(*v)[0], -(*v)[1], 0.0}, -1};
    return out;
}

/// Path excess of the reflected route through p over the direct route.
inline double excess_path(const Point3& p, const Point3& tx, const Point3& rx) {
    return distance(tx, p) + distance(p, rx) - distance(tx, rx);
}

/// Fractional zone index 2*delta/lambda; integer values are zone boundaries.
inline double frac_zone_index(const Point3& p, const Point3& tx, const Point3& rx,
                              double lambda) {
    return 2.0 * excess_path(p, tx, rx) / lambda;
}

/// Minimum distance from an in-plane point to the i-th zone curve, over both
/// branches and the full axial range, by bracketing grid plus golden-section
/// refinement (absolute tolerance 1e-6 m). Returns +inf when the curve misses
/// the plane entirely.
inline double min_distance_to_zone_curve(const Point3& p, const FrameB& f,
                                         double zone_i, double lambda,
                                         int grid_n = 256) {
    detail::ZoneConic conic(f, zone_i, lambda, true);
    auto window = conic.feasible_t();
    if (!window) return std::numeric_limits<double>::infinity();
    double lo = (*window)[0], hi = (*window)[1];
    if (!(hi > lo)) return std::numeric_limits<double>::infinity();
    const double pad = 1e-12 * (hi - lo);
    lo += pad;
    hi -= pad;
    auto fdist = [&](double t) { return conic.dist_to(p, t); };
    const double t_best = grid_golden_minimize(fdist, lo, hi, grid_n, 1e-7);
    return fdist(t_best);
}

/// Same minimization restricted to an axial window (fast path for panel-local
/// judgements; the window must contain the nearest curve segment).
inline double min_distance_to_zone_curve_windowed(const Point3& p, const FrameB& f,
                                                  double zone_i, double lambda,
                                                  double t_lo, double t_hi,
                                                  int grid_n = 48) {
    detail::ZoneConic conic(f, zone_i, lambda, true);
    auto window = conic.feasible_t();
    if (!window) return std::numeric_limits<double>::infinity();
    double lo = std::max(t_lo, (*window)[0] + 1e-12);
    double hi = std::min(t_hi, (*window)[1] - 1e-12);
    if (!(hi > lo)) return std::numeric_limits<double>::infinity();
    auto fdist = [&](double t) { return conic.dist_to(p, t); };
    const double t_best = grid_golden_minimize(fdist, lo, hi, grid_n, 1e-7);
    return fdist(t_best);
}

}  // namespace riszone
