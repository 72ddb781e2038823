/**
 * @file registry.hpp
 * @brief Built-in models by name and structure files (JSON or TOML), each
 *        resolved to a frame, its distinguished Reeb orbit and whatever is
 *        known in closed form about it.
 */
#pragma once

#include "srtight/curvature.hpp"
#include "srtight/errors.hpp"
#include "srtight/models.hpp"
#include "srtight/roots.hpp"
#include "srtight/structures.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

namespace srtight {

struct ModelParams {
    double kappa = 1.0;
    double eps = 0.01;
    std::string alpha = "one";
    std::string beta = "half";
};

/// A structure with one Reeb orbit and the facts about it that do not need
/// the numerical pipeline.
struct Model {
    std::string id;
    FrameStructure structure;
    ReebOrbitSpec orbit;
    std::optional<double> r_inj;                 ///< analytic injectivity radius of the orbit
    std::optional<double> r_tight;               ///< analytic tightness radius, when the family has one
    std::optional<CurvatureProfile> curvatures;  ///< canonical curvatures, identical for every unit covector
    std::optional<double> kappa;                 ///< set for K-contact models
    std::optional<RadialProfile> radial;
    bool kcontact() const { return kappa.has_value(); }
};

namespace detail {

inline ReebOrbitSpec axis_orbit(double speed = 1.0) {
    ReebOrbitSpec o;
    o.curve = [speed](double z) { return Vec3d{0, 0, z * speed}; };
    return o;
}

/// First zero of beta on (0, horizon]; beta ~ r^2/2 is positive near the axis.
inline std::optional<double> first_beta_zero(const RadialProfile& p, double horizon) {
    constexpr int per_unit = 512;
    const int n = static_cast<int>(std::ceil(horizon * per_unit));
    auto b = [&p](double r) { return p.beta(r); };
    double prev = b(1.0 / per_unit);
    for (int i = 2; i <= n; ++i) {
        const double r = std::min(horizon, static_cast<double>(i) / per_unit);
        const double v = b(r);
        if (v <= 0.0 && prev > 0.0) return refine_root(b, r - 1.0 / per_unit, r, 1e-14);
        prev = v;
    }
    return std::nullopt;
}

} // namespace detail

inline Model radial_model(const std::string& alpha, const std::string& beta, double r_max = INFINITY,
                          const std::string& id = "") {
    Model m;
    m.radial = make_radial_profile(alpha, beta, r_max);
    m.structure = radial_to_frame(*m.radial);
    m.id = id.empty() ? m.structure.name : id;
    if (!id.empty()) m.structure.name = id;
    // on the axis f0 = d/dz / alpha(0)
    m.orbit = detail::axis_orbit(1.0 / m.radial->alpha(0.0));
    m.r_inj = INFINITY;
    const double horizon = std::isfinite(m.radial->r_max) ? m.radial->r_max : 50.0;
    const auto z = detail::first_beta_zero(*m.radial, horizon);
    if (z) m.r_tight = *z;
    else if (!std::isfinite(m.radial->r_max)) m.r_tight = INFINITY;
    return m;
}

inline Model kcontact_model(double kappa) {
    Model m;
    m.structure = kcontact_frame(kappa);
    m.id = m.structure.name;
    m.orbit.curve = kcontact_orbit(kappa);
    m.kappa = kappa;
    m.curvatures = kcontact_curvatures(kappa);
    // Reeb-invariant left-invariant models: r_tight = r_inj
    m.r_inj = kappa > 0 ? std::numbers::pi / std::sqrt(kappa) : INFINITY;
    m.r_tight = m.r_inj;
    return m;
}

/// heisenberg, overtwisted, kcontact, radial, perturbed.
inline Model builtin_model(const std::string& name, const ModelParams& p = {}) {
    if (name == "heisenberg") {
        Model m = kcontact_model(0.0);
        m.structure = heisenberg_frame();
        m.id = "heisenberg";
        return m;
    }
    if (name == "overtwisted") return radial_model("cos2:1", "sin2:1", INFINITY, "overtwisted");
    if (name == "kcontact") return kcontact_model(p.kappa);
    if (name == "radial") return radial_model(p.alpha, p.beta);
    if (name == "perturbed") {
        Model m;
        m.structure = perturbed_frame(p.eps);
        m.id = m.structure.name;
        m.orbit = detail::axis_orbit();
        return m;
    }
    throw Error(ErrorKind::InvalidInput, "unknown model '" + name + "'");
}

// ---------------------------------------------------------------------------
// Structure files
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json toml_to_json(const toml::node& n) {
    if (auto t = n.as_table()) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
        return j;
    }
    if (auto a = n.as_array()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& v : *a) j.push_back(toml_to_json(v));
        return j;
    }
    if (auto s = n.value<std::string>(); s && n.is_string()) return *s;
    if (n.is_integer()) return *n.value<std::int64_t>();
    if (n.is_floating_point()) return *n.value<double>();
    if (n.is_boolean()) return *n.value<bool>();
    throw Error(ErrorKind::Parse, "unsupported TOML value");
}

inline Vec3d json_vec3(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::Parse, std::string(what) + " must be a 3-array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Domain json_domain(const nlohmann::json& j) {
    if (j.is_null()) return {};
    const std::string kind = j.value("kind", "box");
    if (kind == "cylinder")
        return Domain::cylinder(j.at("radius").get<double>(), j.value("z_min", -INFINITY), j.value("z_max", INFINITY));
    if (kind == "box") return Domain::box(json_vec3(j.at("lo"), "domain.lo"), json_vec3(j.at("hi"), "domain.hi"));
    throw Error(ErrorKind::Parse, "domain kind must be box or cylinder");
}

} // namespace detail

/// Model from a parsed structure document.
///   kind = "frame":    f0, f1, f2 as 3-arrays of expressions in x, y, z;
///                      optional domain {kind, lo, hi | radius} and
///                      orbit {base, z_min, z_max}.
///   kind = "radial":   alpha, beta profile specs, optional r_max.
///   kind = "kcontact": kappa.
inline Model model_from_json(const nlohmann::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        const std::string name = j.value("name", kind);
        if (kind == "kcontact") {
            Model m = kcontact_model(j.at("kappa").get<double>());
            m.id = name;
            return m;
        }
        if (kind == "radial")
            return radial_model(j.at("alpha").get<std::string>(), j.at("beta").get<std::string>(),
                                j.value("r_max", INFINITY), name);
        if (kind == "frame") {
            std::array<std::array<std::string, 3>, 3> comps;
            const char* keys[3] = {"f0", "f1", "f2"};
            for (int i = 0; i < 3; ++i) {
                const auto& f = j.at(keys[i]);
                if (!f.is_array() || f.size() != 3) throw Error(ErrorKind::Parse, std::string(keys[i]) + " must have 3 components");
                for (int a = 0; a < 3; ++a) comps[i][a] = f[a].is_string() ? f[a].get<std::string>() : f[a].dump();
            }
            Model m;
            m.structure = expression_frame(comps, detail::json_domain(j.value("domain", nlohmann::json())), name);
            m.id = name;
            const auto o = j.value("orbit", nlohmann::json::object());
            if (o.contains("base")) m.orbit.base = detail::json_vec3(o.at("base"), "orbit.base");
            m.orbit.z_min = o.value("z_min", -1.0);
            m.orbit.z_max = o.value("z_max", 1.0);
            return m;
        }
        throw Error(ErrorKind::Parse, "kind must be frame, radial or kcontact");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, e.what());
    }
}

/// Reads a .json or .toml structure file.
inline Model load_model_file(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".toml") {
        try {
            const toml::table t = toml::parse_file(path);
            return model_from_json(detail::toml_to_json(t));
        } catch (const toml::parse_error& e) {
            throw Error(ErrorKind::Parse, std::string(path) + ": " + std::string(e.description()));
        }
    }
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot read '" + path + "'");
    try {
        return model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, path + ": " + e.what());
    }
}

} // namespace srtight
