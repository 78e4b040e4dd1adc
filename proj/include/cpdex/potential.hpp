#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cpdex/beta_table.hpp"
#include "cpdex/geometry.hpp"
#include "cpdex/linalg.hpp"
#include "cpdex/polarizability.hpp"
#include "cpdex/rational.hpp"
#include "cpdex/specfun.hpp"

namespace cpdex {

// One value per coefficient slot, in the fixed slot order (0,1) (0,2) (2,1)
// (2,2) (2,3) (3,1) (4,1) (4,2) (4,3) (4,4) (4,5).
struct BetaValues {
    double b01 = 0, b02 = 0;
    double b21 = 0, b22 = 0, b23 = 0;
    double b3 = 0;
    double b41 = 0, b42 = 0, b43 = 0, b44 = 0, b45 = 0;
};

inline BetaValues beta_values(double xi) {
    return BetaValues{beta(0, 1, xi), beta(0, 2, xi), beta(2, 1, xi),
                      beta(2, 2, xi), beta(2, 3, xi), beta(3, 1, xi),
                      beta(4, 1, xi), beta(4, 2, xi), beta(4, 3, xi),
                      beta(4, 4, xi), beta(4, 5, xi)};
}

// Slot values integrated over frequency; assembling the brace with these and
// scaling by -1/(2 pi) gives the closed-form zero-temperature potential.
inline BetaValues beta_values_integrated() {
    return BetaValues{
        to_double(beta_moment(0, 1)), to_double(beta_moment(0, 2)),
        to_double(beta_moment(2, 1)), to_double(beta_moment(2, 2)),
        to_double(beta_moment(2, 3)), to_double(beta_moment(3, 1)),
        to_double(beta_moment(4, 1)), to_double(beta_moment(4, 2)),
        to_double(beta_moment(4, 3)), to_double(beta_moment(4, 4)),
        to_double(beta_moment(4, 5))};
}

// The four groups of the interaction brace. All lengths are measured in units
// of the separation, so the group values are dimensionless multiples of the
// polarizability scale.
struct BraceTerms {
    double flat = 0.0;
    double linear_curvature = 0.0;
    double curvature_gradient = 0.0;
    double quadratic_curvature = 0.0;
    double total() const {
        return flat + linear_curvature + curvature_gradient + quadratic_curvature;
    }
};

// Brace assembled from a height-function jet. The jet may be in physical
// units; it is rescaled to separation units internally.
inline BraceTerms assemble(const SurfaceJet& jet, const BraceComponents& a,
                           const BetaValues& b) {
    const SurfaceJet r = jet.reduced();
    const double lap = r.hxx + r.hyy;
    const double traceless =
        0.5 * (r.hxx - r.hyy) * a.diff + r.hxy * a.twice_xy;
    const double grad_x = r.hxxx + r.hxyy;
    const double grad_y = r.hxxy + r.hyyy;
    const double squares =
        r.hxx * r.hxx + 2.0 * r.hxy * r.hxy + r.hyy * r.hyy;

    BraceTerms t;
    t.flat = b.b01 * a.perp + b.b02 * a.zz;
    t.linear_curvature = (b.b21 * a.perp + b.b22 * a.zz) * lap + b.b23 * traceless;
    t.curvature_gradient = b.b3 * (a.zx * grad_x + a.zy * grad_y);
    t.quadratic_curvature = lap * lap * (b.b41 * a.perp + b.b42 * a.zz) +
                            squares * (b.b43 * a.perp + b.b44 * a.zz) +
                            b.b45 * lap * traceless;
    return t;
}

// Brace in the principal curvature frame: u, v are the separation-scaled
// principal curvatures and (gx, gy) the separation-scaled curvature gradient
// components along the principal axes. Written so that exchanging the two
// principal directions (u <-> v together with the x <-> y relabeling of the
// tensor components) reproduces the result bit for bit.
inline BraceTerms principal_brace(double u, double v, double gx, double gy,
                                  const BraceComponents& a, const BetaValues& b) {
    BraceTerms t;
    t.flat = b.b01 * a.perp + b.b02 * a.zz;
    t.linear_curvature =
        (u + v) * (b.b21 * a.perp + b.b22 * a.zz) + (0.5 * b.b23) * ((u - v) * a.diff);
    t.curvature_gradient = b.b3 * (a.zx * gx + a.zy * gy);
    t.quadratic_curvature = (u + v) * (u + v) * (b.b41 * a.perp + b.b42 * a.zz) +
                            (u * u + v * v) * (b.b43 * a.perp + b.b44 * a.zz) +
                            (0.5 * b.b45) * ((u * u - v * v) * a.diff);
    return t;
}

// ---------------------------------------------------------------------------
// Potential evaluation. Zero-temperature results are in units of
// hbar*c / d^4 (with d the jet's separation and the polarizability in units
// of d^3); thermal results are in units of k_B*T / d^3.

struct PotentialResult {
    double total = 0.0;
    double flat = 0.0;
    double linear_curvature = 0.0;
    double curvature_gradient = 0.0;
    double quadratic_curvature = 0.0;
    // magnitude of the gradient group excluded by the static-limit formula
    double omitted_gradient = 0.0;
    // Matsubara terms consumed (thermal modes only)
    int terms_used = 0;

    static PotentialResult from_brace(const BraceTerms& t, double scale) {
        PotentialResult r;
        r.flat = scale * t.flat;
        r.linear_curvature = scale * t.linear_curvature;
        r.curvature_gradient = scale * t.curvature_gradient;
        r.quadratic_curvature = scale * t.quadratic_curvature;
        r.total = r.flat + r.linear_curvature + r.curvature_gradient +
                  r.quadratic_curvature;
        return r;
    }
};

// Closed-form zero-temperature potential for a frequency-independent
// polarizability, via the exact frequency moments of the coefficient rows.
inline PotentialResult potential_retarded(const SurfaceJet& jet, const Mat3& alpha0) {
    const BraceComponents a = decompose(alpha0);
    const BraceTerms t = assemble(jet, a, beta_values_integrated());
    return PotentialResult::from_brace(t, -1.0 / (2.0 * std::numbers::pi));
}

// Zero-temperature potential by direct frequency integration; supports the
// single-resonance frequency dependence.
inline PotentialResult potential_t0(const SurfaceJet& jet, const Polarizability& pol,
                                    const QuadratureSpec& spec = {}) {
    validate(pol);
    validate(spec);
    auto part = [&](int which) {
        auto integrand = [&](double xi) {
            const BraceComponents a = decompose(pol.at(xi));
            const BraceTerms t = assemble(jet, a, beta_values(xi));
            switch (which) {
                case 0: return t.flat;
                case 1: return t.linear_curvature;
                case 2: return t.curvature_gradient;
                default: return t.quadratic_curvature;
            }
        };
        return integrate_semiinfinite(integrand, spec).value;
    };
    BraceTerms t{part(0), part(1), part(2), part(3)};
    return PotentialResult::from_brace(t, -1.0 / (2.0 * std::numbers::pi));
}

// Static (high-temperature) limit: half the zero-frequency brace. The
// gradient group drops out of the printed static formula; its would-be value
// is reported separately and excluded from the total.
inline PotentialResult potential_classical(const SurfaceJet& jet, const Mat3& alpha0) {
    const BraceComponents a = decompose(alpha0);
    BraceTerms t = assemble(jet, a, beta_values(0.0));
    const double omitted = -0.5 * t.curvature_gradient;
    t.curvature_gradient = 0.0;
    PotentialResult r = PotentialResult::from_brace(t, -0.5);
    r.omitted_gradient = omitted;
    return r;
}

// Matsubara sum at reduced temperature tau = 2 pi d k_B T / (hbar c): the
// n = 0 term enters with half weight and the sum is truncated once the next
// term is negligible and the frequency has cleared the decay scale.
inline PotentialResult potential_finite_t(const SurfaceJet& jet,
                                          const Polarizability& pol, double tau,
                                          double rel_tol = 1e-10,
                                          int max_terms = 200000) {
    validate(pol);
    if (!(tau > 0.0))
        throw std::invalid_argument("potential_finite_t: tau must be positive");

    auto brace_at = [&](double xi) {
        return assemble(jet, decompose(pol.at(xi)), beta_values(xi));
    };

    BraceTerms sum = brace_at(0.0);
    sum.flat *= 0.5;
    sum.linear_curvature *= 0.5;
    sum.curvature_gradient *= 0.5;
    sum.quadratic_curvature *= 0.5;
    int n = 1;
    for (; n <= max_terms; ++n) {
        const double xi = n * tau;
        const BraceTerms t = brace_at(xi);
        sum.flat += t.flat;
        sum.linear_curvature += t.linear_curvature;
        sum.curvature_gradient += t.curvature_gradient;
        sum.quadratic_curvature += t.quadratic_curvature;
        const double scale = std::abs(sum.total());
        if (xi > 10.0 && std::abs(t.total()) < rel_tol * std::max(scale, 1e-300))
            break;
    }
    if (n > max_terms)
        throw ConvergenceError("potential_finite_t: Matsubara sum did not settle",
                               -sum.total());
    PotentialResult r = PotentialResult::from_brace(sum, -1.0);
    r.terms_used = n + 1;
    return r;
}

// Single-resonance bridge between the static limit and zero temperature:
// the static result scaled by x coth x at x = (hbar w_r) / (2 k_B T), which
// in reduced variables is pi / (tau * resonance_length).
inline PotentialResult potential_london(const SurfaceJet& jet, const Mat3& alpha0,
                                        double resonance_length, double tau) {
    if (!(resonance_length > 0.0) || !(tau > 0.0))
        throw std::invalid_argument(
            "potential_london: resonance length and tau must be positive");
    const double x = std::numbers::pi / (tau * resonance_length);
    const double factor = x_coth_x(x);
    PotentialResult r = potential_classical(jet, alpha0);
    r.total *= factor;
    r.flat *= factor;
    r.linear_curvature *= factor;
    r.curvature_gradient *= factor;
    r.quadratic_curvature *= factor;
    r.omitted_gradient *= factor;
    return r;
}

// Converts a thermal-mode value (units k_B T / d^3) to the zero-temperature
// normalization (units hbar c / d^4) at reduced temperature tau.
inline double thermal_to_t0_units(double value, double tau) {
    return value * tau / (2.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Orientation scan: rigidly rotate the particle so its body z axis points
// along the sampled direction, evaluate the closed-form potential, and track
// the energetically preferred orientation.

struct OrientationSample {
    double polar = 0.0;
    double azimuth = 0.0;
    double total = 0.0;
};

struct OrientationScanResult {
    std::vector<OrientationSample> samples;
    std::size_t best = 0;
    bool degenerate = false;  // the scan resolves no orientation dependence
};

inline OrientationScanResult orientation_scan(const SurfaceJet& jet,
                                              const Mat3& alpha0, int n_polar,
                                              int n_azimuth) {
    if (n_polar < 1 || n_azimuth < 1)
        throw std::invalid_argument("orientation_scan: grid sizes must be positive");
    OrientationScanResult out;
    double lo = 0.0, hi = 0.0;
    for (int ip = 0; ip < n_polar; ++ip) {
        const double theta =
            (n_polar == 1) ? 0.0 : ip * std::numbers::pi / (n_polar - 1);
        for (int ia = 0; ia < n_azimuth; ++ia) {
            const double phi = ia * 2.0 * std::numbers::pi / n_azimuth;
            const Vec3 axis{std::sin(theta) * std::cos(phi),
                            std::sin(theta) * std::sin(phi), std::cos(theta)};
            const Mat3 rot = rotation_taking(Vec3{0.0, 0.0, 1.0}, axis);
            const Mat3 alpha = rotate_tensor(rot, alpha0);
            const double u = potential_retarded(jet, alpha).total;
            if (out.samples.empty() || u < lo) lo = u;
            if (out.samples.empty() || u > hi) hi = u;
            if (!out.samples.empty() && u < out.samples[out.best].total)
                out.best = out.samples.size();
            out.samples.push_back({theta, phi, u});
        }
    }
    const double span = hi - lo;
    out.degenerate = span <= 1e-12 * std::max({std::abs(lo), std::abs(hi), 1e-30});
    return out;
}

}  // namespace cpdex
