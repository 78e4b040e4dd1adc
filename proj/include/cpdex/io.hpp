#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "cpdex/geometry.hpp"
#include "cpdex/polarizability.hpp"

namespace cpdex {

using nlohmann::json;

// Malformed, unreadable, or inconsistent input files. The front end maps
// this, together with std::invalid_argument from the domain validators, to
// its input-error exit code.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Deterministic text output. Every floating-point number crossing the file
// boundary goes through the same 12-significant-digit conversion, so a fixed
// configuration yields byte-identical files.

inline std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of a negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

// Nearest double of the emitted decimal form, for numbers embedded in
// structured output; both output formats then carry the same values.
inline double round_trip_12(double v) {
    return std::strtod(format_number(v).c_str(), nullptr);
}

// FNV-1a, 64-bit, used to fingerprint a resolved run configuration.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex_digest(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// JSON loading with the offending path or field named in every failure.

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline json parse_json_text(const std::string& text, const std::string& context) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError(context + ": not valid JSON");
    return j;
}

namespace detail {

inline const json& require_field(const json& j, const char* key,
                                 const std::string& context) {
    if (!j.is_object()) throw InputError(context + ": expected a JSON object");
    auto it = j.find(key);
    if (it == j.end())
        throw InputError(context + ": missing field \"" + std::string(key) + "\"");
    return *it;
}

inline double require_number(const json& j, const char* key,
                             const std::string& context) {
    const json& v = require_field(j, key, context);
    if (!v.is_number())
        throw InputError(context + ": field \"" + std::string(key) +
                         "\" must be a number");
    return v.get<double>();
}

inline double optional_number(const json& j, const char* key, double fallback,
                              const std::string& context) {
    if (!j.is_object()) throw InputError(context + ": expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number())
        throw InputError(context + ": field \"" + std::string(key) +
                         "\" must be a number");
    return it->get<double>();
}

inline std::string require_string(const json& j, const char* key,
                                  const std::string& context) {
    const json& v = require_field(j, key, context);
    if (!v.is_string())
        throw InputError(context + ": field \"" + std::string(key) +
                         "\" must be a string");
    return v.get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Particle file: {"model": "static" | "two_state", "alpha0": 3x3 nested
// array, "resonance_length": number (two_state only)}. The tensor is in
// units of the evaluation separation cubed; the resonance length is in units
// of the separation.

inline Polarizability parse_atom(const json& j) {
    const std::string context = "atom";
    Polarizability p;
    const std::string model = detail::require_string(j, "model", context);
    if (model == "static") {
        p.model = Polarizability::Model::fixed;
    } else if (model == "two_state") {
        p.model = Polarizability::Model::two_state;
    } else {
        throw InputError(context + ": unknown model \"" + model + "\"");
    }
    const json& a = detail::require_field(j, "alpha0", context);
    if (!a.is_array() || a.size() != 3)
        throw InputError(context + ": \"alpha0\" must be a 3x3 array");
    for (int r = 0; r < 3; ++r) {
        const json& row = a[r];
        if (!row.is_array() || row.size() != 3)
            throw InputError(context + ": \"alpha0\" must be a 3x3 array");
        for (int c = 0; c < 3; ++c) {
            if (!row[c].is_number())
                throw InputError(context + ": \"alpha0\" entries must be numbers");
            p.alpha0(r, c) = row[c].get<double>();
        }
    }
    if (p.model == Polarizability::Model::two_state)
        p.resonance_length = detail::require_number(j, "resonance_length", context);
    validate(p);
    return p;
}

// ---------------------------------------------------------------------------
// Surface file: {"family": ..., "units": "d" | "absolute", family fields}.
// With "d" units every length in the file is a multiple of the evaluation
// separation, so the reduced geometry is the same at all separations; with
// "absolute" units the fields are fixed lengths and the geometry seen by the
// particle changes along a separation sweep.

struct SurfaceSpec {
    SurfaceShape shape;  // field values exactly as read
    bool lengths_in_d = true;
};

inline SurfaceSpec parse_surface(const json& j) {
    const std::string context = "surface";
    SurfaceSpec out;
    const std::string units = j.is_object() && j.contains("units")
                                  ? detail::require_string(j, "units", context)
                                  : std::string("d");
    if (units == "d") {
        out.lengths_in_d = true;
    } else if (units == "absolute") {
        out.lengths_in_d = false;
    } else {
        throw InputError(context + ": units must be \"d\" or \"absolute\"");
    }
    const std::string family = detail::require_string(j, "family", context);
    if (family == "sphere") {
        out.shape = Sphere{detail::require_number(j, "radius", context)};
    } else if (family == "cylinder") {
        out.shape = Cylinder{detail::require_number(j, "radius", context),
                             detail::optional_number(j, "axis_angle", 0.0, context)};
    } else if (family == "sinusoid") {
        out.shape = Sinusoid{detail::require_number(j, "amplitude", context),
                             detail::require_number(j, "wavelength", context),
                             detail::optional_number(j, "phase", 0.0, context),
                             detail::optional_number(j, "direction", 0.0, context)};
    } else if (family == "gaussian_bump") {
        out.shape = GaussianBump{detail::require_number(j, "height", context),
                                 detail::require_number(j, "width", context)};
    } else if (family == "polynomial") {
        // coefficients as [m, n, value] triples for the monomials x^m y^n
        Polynomial poly;
        const json& terms = detail::require_field(j, "coefficients", context);
        if (!terms.is_array())
            throw InputError(context + ": \"coefficients\" must be an array");
        for (const json& t : terms) {
            if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
                !t[1].is_number_integer() || !t[2].is_number())
                throw InputError(context +
                                 ": each coefficient must be an [m, n, value] triple");
            const int m = t[0].get<int>();
            const int n = t[1].get<int>();
            if (m < 0 || n < 0 || m + n > 4)
                throw InputError(context +
                                 ": coefficient degrees must satisfy 0 <= m + n <= 4");
            poly.c[m][n] = t[2].get<double>();
        }
        out.shape = poly;
    } else if (family == "grid") {
        Grid g;
        g.spacing = detail::require_number(j, "spacing", context);
        const double nxd = detail::require_number(j, "nx", context);
        const double nyd = detail::require_number(j, "ny", context);
        g.nx = static_cast<int>(nxd);
        g.ny = static_cast<int>(nyd);
        if (g.nx != nxd || g.ny != nyd)
            throw InputError(context + ": nx and ny must be integers");
        const json& heights = detail::require_field(j, "heights", context);
        if (!heights.is_array())
            throw InputError(context + ": \"heights\" must be an array");
        for (const json& h : heights) {
            if (!h.is_number())
                throw InputError(context + ": \"heights\" entries must be numbers");
            g.heights.push_back(h.get<double>());
        }
        // default places the grid center under the particle
        g.x0 = detail::optional_number(j, "x0", -0.5 * g.spacing * (g.nx - 1), context);
        g.y0 = detail::optional_number(j, "y0", -0.5 * g.spacing * (g.ny - 1), context);
        out.shape = g;
    } else {
        throw InputError(context + ": unknown family \"" + family + "\"");
    }
    // reject inconsistent field values early, at their native scale
    SurfaceProfile probe{out.shape, 1.0};
    validate(probe);
    return out;
}

// Profile with the particle held at the requested separation above the
// shape's reference point. "d"-unit length fields scale into absolute
// lengths here; a polynomial coefficient of x^m y^n carries length dimension
// 1 - m - n, and angles are left alone.
inline SurfaceProfile realize(const SurfaceSpec& spec, double distance) {
    if (!(distance > 0.0))
        throw std::invalid_argument("surface: separation must be positive");
    SurfaceProfile prof{spec.shape, distance};
    if (spec.lengths_in_d && distance != 1.0) {
        const double d = distance;
        std::visit(
            [&](auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Sphere>) {
                    s.radius *= d;
                } else if constexpr (std::is_same_v<T, Cylinder>) {
                    s.radius *= d;
                } else if constexpr (std::is_same_v<T, Sinusoid>) {
                    s.amplitude *= d;
                    s.wavelength *= d;
                } else if constexpr (std::is_same_v<T, GaussianBump>) {
                    s.height *= d;
                    s.width *= d;
                } else if constexpr (std::is_same_v<T, Polynomial>) {
                    for (int m = 0; m <= 4; ++m)
                        for (int n = 0; n + m <= 4; ++n)
                            s.c[m][n] *= std::pow(d, 1.0 - m - n);
                } else {
                    s.spacing *= d;
                    s.x0 *= d;
                    s.y0 *= d;
                    for (double& h : s.heights) h *= d;
                }
            },
            prof.shape);
    }
    validate(prof);
    return prof;
}

// ---------------------------------------------------------------------------
// Physical constants block, SI units with CODATA defaults. Only consulted in
// physical-units mode; reduced mode never multiplies by them.

struct Constants {
    double hbar = 1.054571817e-34;  // J s
    double c = 299792458.0;         // m / s
    double k_B = 1.380649e-23;      // J / K
};

inline Constants parse_constants(const json& j) {
    const std::string context = "constants";
    Constants k;
    k.hbar = detail::optional_number(j, "hbar", k.hbar, context);
    k.c = detail::optional_number(j, "c", k.c, context);
    k.k_B = detail::optional_number(j, "k_B", k.k_B, context);
    if (!(k.hbar > 0.0) || !(k.c > 0.0) || !(k.k_B > 0.0))
        throw InputError(context + ": all constants must be positive");
    return k;
}

}  // namespace cpdex
