#pragma once

#include <cmath>
#include <stdexcept>

#include "cpdex/linalg.hpp"

namespace cpdex {

// Particle response along the imaginary frequency axis, in the reduced
// variable xi (frequency times separation over the wave speed). The static
// model is frequency independent; the two-state model rolls off as
// 1 / (1 + (L xi)^2) with L the resonance wavelength scale in separation
// units, which reproduces both the static and the strongly retarded limits of
// a single dominant transition.
struct Polarizability {
    enum class Model { fixed, two_state };

    Model model = Model::fixed;
    Mat3 alpha0;                    // static tensor, symmetric
    double resonance_length = 0.0;  // L above; two_state only, in units of d

    Mat3 at(double xi) const {
        if (model == Model::fixed) return alpha0;
        const double u = resonance_length * xi;
        return (1.0 / (1.0 + u * u)) * alpha0;
    }
};

// Largest relative asymmetry of a would-be symmetric tensor.
inline double tensor_asymmetry(const Mat3& t) {
    double scale = 0.0;
    for (double v : t.m) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c)
            worst = std::max(worst, std::abs(t(r, c) - t(c, r)));
    return worst / scale;
}

inline void validate(const Polarizability& p) {
    if (tensor_asymmetry(p.alpha0) > 1e-12)
        throw std::invalid_argument("polarizability: alpha0 must be symmetric");
    if (p.model == Polarizability::Model::two_state && !(p.resonance_length > 0.0))
        throw std::invalid_argument("polarizability: two_state needs a positive resonance length");
}

// Tensor seen from axes turned by angle about z: t' = R^T t R.
inline Mat3 rotate_inplane(const Mat3& t, double angle) {
    const Mat3 r = rotation_about_axis({0, 0, 1}, angle);
    return transpose(r) * t * r;
}

// The five tensor contractions the interaction brace is built from. The pairs
// (diff, twice_xy) and (zx, zy) each transform covariantly under in-plane
// rotation, which is what makes the brace frame-independent.
struct BraceComponents {
    double perp = 0.0;      // xx + yy, the in-plane trace
    double zz = 0.0;
    double diff = 0.0;      // xx - yy
    double twice_xy = 0.0;  // 2 xy
    double zx = 0.0;
    double zy = 0.0;
};

inline BraceComponents decompose(const Mat3& t) {
    if (tensor_asymmetry(t) > 1e-12)
        throw std::invalid_argument("decompose: tensor is not symmetric");
    return BraceComponents{t(0, 0) + t(1, 1), t(2, 2),
                           t(0, 0) - t(1, 1), 2.0 * t(0, 1),
                           t(2, 0),           t(2, 1)};
}

inline bool is_isotropic(const Mat3& t, double tol = 1e-12) {
    const double a = t(0, 0);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const double want = (r == c) ? a : 0.0;
            if (std::abs(t(r, c) - want) > tol * std::max(1.0, std::abs(a))) return false;
        }
    return true;
}

}  // namespace cpdex
