#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace riszone {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kEta0 = 376.730313668;            // free-space impedance, ohm

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const { return *this / norm(); }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Row-major 3x3 matrix; rows are the target-frame axes when used as a rotation.
struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
    Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }

    Vec3 apply(const Vec3& v) const {
        return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
    }
    Vec3 apply_transposed(const Vec3& v) const {
        return {col(0).dot(v), col(1).dot(v), col(2).dot(v)};
    }

    /// Max absolute deviation of M*M^T from identity.
    double orthonormality_defect() const {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double dot = row(i).dot(row(j));
                worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
            }
        return worst;
    }
};

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return db_to_linear(dbm) * 1e-3; }
inline double watt_to_dbm(double w) { return linear_to_db(w * 1e3); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Golden-section minimization of f over [lo, hi] down to interval width `tol`.
/// f must be unimodal on the bracket for an exact answer; callers bracket with
/// a grid first.
template <typename F>
double golden_minimize(F&& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

/// Grid scan (n points, inclusive ends) followed by golden-section refinement
/// around the best grid point. Returns the argmin.
template <typename F>
double grid_golden_minimize(F&& f, double lo, double hi, int n, double tol) {
    if (!(hi > lo)) return lo;
    if (n < 3) n = 3;
    double best_x = lo, best_f = f(lo);
    const double step = (hi - lo) / (n - 1);
    for (int i = 1; i < n; ++i) {
        double x = lo + step * i;
        double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    double blo = std::max(lo, best_x - step);
    double bhi = std::min(hi, best_x + step);
    return golden_minimize(f, blo, bhi, tol);
}

}  // namespace riszone
