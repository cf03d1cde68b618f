#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riszone/geometry.hpp"
#include "riszone/math.hpp"

namespace riszone {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full experiment description. Defaults reproduce the reference setup:
/// 28 GHz, 30 dBm, one Tx antenna at (10,10,15), Rx at (-10,10,1.5),
/// one 80x80 half-wavelength panel at the origin, Gamma_r = 0.9,
/// tau = 0.5, 15 dBi Tx boresight gain, isotropic Rx, -90 dBm noise.
struct Scenario {
    double frequency_hz = 28e9;
    std::vector<Point3> tx_antennas{{10.0, 10.0, 15.0}};
    Point3 rx{-10.0, 10.0, 1.5};
    std::vector<PanelSpec> panels;
    double gamma_r = 0.9;
    double tau = 0.5;
    std::optional<double> fixed_xi_m;    // overrides the threshold search
    double tx_boresight_gain_dbi = 15.0;
    double noise_dbm = -90.0;
    double tx_power_dbm = 30.0;
    Vec3 sigma_m{0.0, 0.0, 0.0};
    int trials = 1000;
    std::uint64_t seed = 42;
    int boresight_panel = 0;             // which panel the Tx main lobe faces
    bool random_continuous = false;      // random baseline: continuous phases

    double wavelength() const { return kSpeedOfLight / frequency_hz; }
    double wavenumber() const { return 2.0 * kPi / wavelength(); }
    double tx_power_w() const { return dbm_to_watt(tx_power_dbm); }
    double noise_w() const { return dbm_to_watt(noise_dbm); }

    /// Fills in the default panel (80x80, lambda/2 elements, identity pose at
    /// the origin) when none was given; element sizes <= 0 mean lambda/2.
    void resolve_defaults() {
        if (panels.empty()) {
            PanelSpec p;
            p.rows = 80;
            p.cols = 80;
            panels.push_back(p);
        }
        for (auto& p : panels) {
            if (p.elem_a <= 0) p.elem_a = wavelength() / 2.0;
            if (p.elem_b <= 0) p.elem_b = wavelength() / 2.0;
        }
    }

    void validate() const {
        if (!(frequency_hz > 0)) throw ScenarioError("frequency_hz must be positive");
        if (tx_antennas.empty()) throw ScenarioError("need at least one tx antenna");
        for (const auto& t : tx_antennas)
            if (!t.finite()) throw ScenarioError("non-finite tx antenna position");
        if (!rx.finite()) throw ScenarioError("non-finite rx position");
        if (panels.empty()) throw ScenarioError("need at least one panel");
        for (const auto& p : panels) p.validate();
        if (!(gamma_r >= 0.0 && gamma_r <= 1.0))
            throw ScenarioError("gamma_r must lie in [0, 1]");
        if (!(tau > 0.0 && tau <= 0.5))
            throw ScenarioError("tau must lie in (0, 0.5]");
        if (fixed_xi_m && !(*fixed_xi_m > 0))
            throw ScenarioError("fixed_xi_m must be positive");
        if (!(dbm_to_watt(noise_dbm) > 0)) throw ScenarioError("bad noise power");
        if (sigma_m.x < 0 || sigma_m.y < 0 || sigma_m.z < 0)
            throw ScenarioError("sigma components must be >= 0");
        if (trials < 1) throw ScenarioError("trials must be >= 1");
        if (boresight_panel < 0 ||
            boresight_panel >= static_cast<int>(panels.size()))
            throw ScenarioError("boresight_panel out of range");
    }
};

namespace detail {

inline Point3 parse_vec3(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3)
        throw ScenarioError(key + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ScenarioError("unknown key '" + it.key() + "' in " + where);
    }
}

inline PanelSpec parse_panel(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"rows", "cols", "elem_a_m", "elem_b_m", "origin_m",
                         "x_axis", "y_axis", "z_axis"},
                        "panel");
    PanelSpec p;
    p.rows = j.value("rows", 80);
    p.cols = j.value("cols", 80);
    p.elem_a = j.value("elem_a_m", -1.0);
    p.elem_b = j.value("elem_b_m", -1.0);
    if (j.contains("origin_m")) p.pose.origin = parse_vec3(j["origin_m"], "origin_m");
    Vec3 xa{1, 0, 0}, ya{0, 1, 0}, za{0, 0, 1};
    if (j.contains("x_axis")) xa = parse_vec3(j["x_axis"], "x_axis");
    if (j.contains("y_axis")) ya = parse_vec3(j["y_axis"], "y_axis");
    if (j.contains("z_axis")) za = parse_vec3(j["z_axis"], "z_axis");
    else if (j.contains("x_axis") && j.contains("y_axis")) za = xa.cross(ya);
    p.pose.orientation.m[0][0] = xa.x; p.pose.orientation.m[0][1] = xa.y; p.pose.orientation.m[0][2] = xa.z;
    p.pose.orientation.m[1][0] = ya.x; p.pose.orientation.m[1][1] = ya.y; p.pose.orientation.m[1][2] = ya.z;
    p.pose.orientation.m[2][0] = za.x; p.pose.orientation.m[2][1] = za.y; p.pose.orientation.m[2][2] = za.z;
    return p;
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"frequency_hz", "tx_antennas_m", "rx_m", "panels", "gamma_r", "tau",
         "fixed_xi_m", "tx_boresight_gain_dbi", "noise_dbm", "tx_power_dbm",
         "sigma_m", "trials", "seed", "boresight_panel", "random_continuous"},
        "scenario");
    Scenario s;
    if (j.contains("frequency_hz")) s.frequency_hz = j["frequency_hz"].get<double>();
    if (j.contains("tx_antennas_m")) {
        s.tx_antennas.clear();
        for (const auto& a : j["tx_antennas_m"])
            s.tx_antennas.push_back(detail::parse_vec3(a, "tx_antennas_m"));
    }
    if (j.contains("rx_m")) s.rx = detail::parse_vec3(j["rx_m"], "rx_m");
    if (j.contains("panels"))
        for (const auto& p : j["panels"]) s.panels.push_back(detail::parse_panel(p));
    if (j.contains("gamma_r")) s.gamma_r = j["gamma_r"].get<double>();
    if (j.contains("tau")) s.tau = j["tau"].get<double>();
    if (j.contains("fixed_xi_m")) s.fixed_xi_m = j["fixed_xi_m"].get<double>();
    if (j.contains("tx_boresight_gain_dbi"))
        s.tx_boresight_gain_dbi = j["tx_boresight_gain_dbi"].get<double>();
    if (j.contains("noise_dbm")) s.noise_dbm = j["noise_dbm"].get<double>();
    if (j.contains("tx_power_dbm")) s.tx_power_dbm = j["tx_power_dbm"].get<double>();
    if (j.contains("sigma_m")) {
        auto v = detail::parse_vec3(j["sigma_m"], "sigma_m");
        s.sigma_m = {v.x, v.y, v.z};
    }
    if (j.contains("trials")) s.trials = j["trials"].get<int>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("boresight_panel")) s.boresight_panel = j["boresight_panel"].get<int>();
    if (j.contains("random_continuous")) s.random_continuous = j["random_continuous"].get<bool>();
    s.resolve_defaults();
    s.validate();
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

inline Scenario default_scenario() {
    Scenario s;
    s.resolve_defaults();
    s.validate();
    return s;
}

namespace detail {

inline void hash_mix(std::uint64_t& h, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

}  // namespace detail

/// Stable content hash over every resolved scenario field; lands in output
/// metadata so result files are traceable to their inputs.
inline std::uint64_t scenario_hash(const Scenario& s) {
    std::uint64_t h = 0x5a8f2d1c3b4e6979ULL;
    auto mixv = [&h](const Vec3& v) {
        detail::hash_mix(h, v.x);
        detail::hash_mix(h, v.y);
        detail::hash_mix(h, v.z);
    };
    detail::hash_mix(h, s.frequency_hz);
    for (const auto& t : s.tx_antennas) mixv(t);
    mixv(s.rx);
    for (const auto& p : s.panels) {
        detail::hash_mix(h, p.rows);
        detail::hash_mix(h, p.cols);
        detail::hash_mix(h, p.elem_a);
        detail::hash_mix(h, p.elem_b);
        mixv(p.pose.origin);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) detail::hash_mix(h, p.pose.orientation.m[i][j]);
    }
    detail::hash_mix(h, s.gamma_r);
    detail::hash_mix(h, s.tau);
    detail::hash_mix(h, s.fixed_xi_m.value_or(-1.0));
    detail::hash_mix(h, s.tx_boresight_gain_dbi);
    detail::hash_mix(h, s.noise_dbm);
    detail::hash_mix(h, s.tx_power_dbm);
    mixv({s.sigma_m.x, s.sigma_m.y, s.sigma_m.z});
    detail::hash_mix(h, static_cast<double>(s.trials));
    detail::hash_mix(h, static_cast<double>(s.seed));
    detail::hash_mix(h, static_cast<double>(s.boresight_panel));
    detail::hash_mix(h, s.random_continuous ? 1.0 : 0.0);
    return h;
}

}  // namespace riszone
