// Numbered acceptance battery for the curvature-expansion engine. Each
// criterion prints exactly one PASS or FAIL line with its wall time; the
// process exits nonzero if any line fails. Criteria with a runtime budget
// fail when they exceed it, so a pathological slowdown cannot hide.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cpdex/beta_table.hpp"
#include "cpdex/geometry.hpp"
#include "cpdex/oracle.hpp"
#include "cpdex/potential.hpp"
#include "cpdex/version.hpp"

using namespace cpdex;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void report(int number, const char* name, bool pass, double secs,
            const std::string& detail) {
    std::printf("%-4s %2d  %-28s %8.2f s  %s\n", pass ? "PASS" : "FAIL", number,
                name, secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return std::string(b);
}

// 1. The static limit of the table assembles into the printed
// high-temperature energy with every monomial coefficient exact.
void criterion_classical() {
    Timer t;
    auto b = [](int p, int q) { return beta_classical(p, q); };
    int exact = 0;
    exact += b(0, 1) == Rational(1, 8);                    // in-plane trace
    exact += b(0, 2) == Rational(1, 4);                    // zz
    exact += b(2, 1) + b(2, 3) / 2 == Rational(-9, 64);    // xx, d/R1
    exact += b(2, 1) - b(2, 3) / 2 == Rational(-3, 64);    // xx, d/R2
    exact += b(2, 1) - b(2, 3) / 2 == Rational(-3, 64);    // yy, d/R1
    exact += b(2, 1) + b(2, 3) / 2 == Rational(-9, 64);    // yy, d/R2
    exact += b(2, 2) == Rational(-1, 16);                  // zz, d/R1 + d/R2
    exact += b(4, 1) + b(4, 3) + b(4, 5) / 2 == Rational(17, 128);  // xx, (d/R1)^2
    exact += b(4, 1) + b(4, 3) - b(4, 5) / 2 == Rational(5, 128);   // xx, (d/R2)^2
    exact += b(4, 1) * 2 == Rational(1, 64);               // xx, cross term
    exact += b(4, 2) + b(4, 4) == Rational(5, 64);         // zz, squares
    exact += b(4, 2) * 2 == Rational(-1, 32);              // zz, cross term
    const double secs = t.seconds();
    report(1, "classical-limit exactness", exact == 12 && secs < 1.0, secs,
           std::to_string(exact) + "/12 monomial coefficients exact in rational "
                                   "arithmetic");
}

// 2. Frequency integrals: quadrature against closed form for the ten clean
// rows, and the exact moment-to-coefficient mapping.
void criterion_moments() {
    Timer t;
    double worst = 0.0;
    for (const BetaId& id : beta_slots) {
        if (id.p == 4 && id.q == 2) continue;
        const double closed = to_double(beta_moment(id.p, id.q));
        const double quad =
            integrate_semiinfinite([&](double x) { return beta(id.p, id.q, x); })
                .value;
        worst = std::max(worst, std::abs(quad - closed) / std::abs(closed));
    }
    const RetardedCoefficients m = moment_mapping();
    const bool mapping =
        m.flat_perp == Rational(1, 8) && m.flat_zz == Rational(1, 8) &&
        m.linear_perp == Rational(-3, 40) && m.linear_zz == Rational(-1, 15) &&
        m.linear_diff == Rational(-1, 40) && m.gradient == Rational(1, 30) &&
        m.square_sum_perp == Rational(3, 280) &&
        m.square_sum_zz == Rational(-1, 240) &&
        m.square_each_perp == Rational(13, 280) &&
        m.square_each_zz == Rational(3, 40) && m.square_diff == Rational(9, 560);
    const double secs = t.seconds();
    report(2, "moment identities", worst <= 1e-8 && mapping && secs < 10.0, secs,
           "worst quadrature gap " + num(worst) + " rel; mapping " +
               (mapping ? "exact" : "broken"));
}

// 3. The corrupted slot: the row as printed must fail its own moment by a
// wide margin, and the shipped replacement must pass.
void criterion_corruption() {
    Timer t;
    const double target = -1.0 / 120.0;
    const double verbatim = to_double(beta_moment_verbatim(4, 2));
    const double deviation = std::abs(verbatim - target);
    const bool detected = deviation > 1e3 * 1e-3;
    const double recovered =
        integrate_semiinfinite([](double x) { return beta(4, 2, x); }).value;
    const double recovered_gap = std::abs(recovered - target);
    report(3, "corruption detection", detected && recovered_gap <= 1e-3,
           t.seconds(),
           "printed row integrates to " + num(verbatim) + ", off -1/120 by " +
               num(deviation) + " (must exceed 1); recovered row gap " +
               num(recovered_gap));
}

// 4. Flat-surface kernel against the table, closed form and direct
// quadrature of the defining integrals.
void criterion_order0() {
    Timer t;
    double worst = 0.0;
    for (double xi : {0.0, 0.5, 1.0, 2.0}) {
        const oracle::FlatKernel closed = oracle::flat_kernel(xi);
        const oracle::FlatKernel integral = oracle::flat_kernel_quadrature(xi);
        worst = std::max({worst, std::abs(closed.xx - beta(0, 1, xi)),
                          std::abs(closed.zz - beta(0, 2, xi)),
                          std::abs(integral.xx - beta(0, 1, xi)),
                          std::abs(integral.zz - beta(0, 2, xi))});
    }
    const double secs = t.seconds();
    report(4, "oracle order 0", worst <= 1e-6 && secs < 10.0, secs,
           "worst row gap " + num(worst));
}

// 5. First deformation order re-derives the curvature rows.
void criterion_order1() {
    Timer t;
    double worst = 0.0;
    for (double xi : {0.0, 0.2, 0.5, 1.0}) {
        const oracle::LowOrderCoefficients c = oracle::extract_low_order(xi);
        worst = std::max({worst, std::abs(c.b21 - beta(2, 1, xi)),
                          std::abs(c.b22 - beta(2, 2, xi)),
                          std::abs(c.b23 - beta(2, 3, xi)),
                          std::abs(c.b3 - beta(3, 1, xi))});
    }
    const double secs = t.seconds();
    report(5, "oracle order 1", worst <= 1e-4 && secs < 300.0, secs,
           "worst row gap " + num(worst));
}

// 6. Second deformation order re-derives the quadratic rows and rebuilds the
// corrupted slot from scratch, moment constraint included.
void criterion_order2() {
    Timer t;
    double worst = 0.0;
    for (double xi : {0.0, 0.5}) {
        const oracle::QuadraticCoefficients c = oracle::extract_quadratic(xi);
        worst = std::max({worst, std::abs(c.b41 - beta(4, 1, xi)),
                          std::abs(c.b43 - beta(4, 3, xi)),
                          std::abs(c.b44 - beta(4, 4, xi)),
                          std::abs(c.b45 - beta(4, 5, xi))});
    }
    std::vector<std::pair<double, double>> samples;
    for (double xi : oracle::beta42_sample_grid())
        samples.push_back({xi, oracle::extract_b42(xi)});
    const oracle::Beta42Recovery rec = oracle::recover_beta42(samples);
    const double moment_gap = std::abs(rec.moment - (-1.0 / 120.0));
    const double secs = t.seconds();
    report(6, "oracle order 2",
           worst <= 1e-3 && moment_gap <= 1e-3 && secs < 1800.0, secs,
           "worst row gap " + num(worst) + "; fresh recovery moment gap " +
               num(moment_gap) + ", fit rms " + num(rec.rms_residual));
}

// 7. The deformation orders are tied to separation derivatives of their
// predecessors.
void criterion_translation() {
    Timer t;
    double worst = 0.0;
    const double samples[3][2] = {{0.2, 0.15}, {0.5, 0.3}, {1.0, 0.45}};
    for (const auto& s : samples) {
        const oracle::TranslationCheck gap = oracle::translation_check(s[0], s[1]);
        worst = std::max({worst, gap.flat_gap, gap.first_gap});
    }
    report(7, "translation identities", worst <= 1e-5, t.seconds(),
           "worst identity gap " + num(worst));
}

// 8. Isotropic particle over a cylinder: the leading correction coefficient
// relative to the flat term is a ratio of two table moments.
void criterion_cylinder() {
    Timer t;
    const SurfaceProfile prof{Cylinder{200.0, 0.0}, 1.0};
    const SurfaceJet jr = surface_jet(prof).reduced();
    const PotentialResult r = potential_retarded(jr, Mat3::diagonal(1.0, 1.0, 1.0));
    const double ratio = r.linear_curvature / r.flat / (jr.hxx + jr.hyy);
    const double target = to_double(Rational(-13, 60) / Rational(3, 8));
    const double gap = std::abs(ratio - target);
    report(8, "cylinder correction ratio", gap <= 1e-10, t.seconds(),
           "leading d/R coefficient " + num(ratio) + " vs -(13/60)/(3/8), gap " +
               num(gap));
}

// 9. The temperature regimes agree where their domains overlap.
void criterion_regimes() {
    Timer t;
    const SurfaceJet flat;  // separation 1, no curvature
    const SurfaceJet sphere = surface_jet({Sphere{10.0}, 1.0}).reduced();

    Polarizability pol;
    pol.model = Polarizability::Model::two_state;
    pol.alpha0 = Mat3::diagonal(0.3, 0.3, 0.5);
    pol.resonance_length = 0.7;

    double worst_cold = 0.0, worst_hot = 0.0;
    for (const SurfaceJet* jet : {&flat, &sphere}) {
        const double cold =
            thermal_to_t0_units(potential_finite_t(*jet, pol, 0.01).total, 0.01);
        const double direct = potential_t0(*jet, pol).total;
        worst_cold = std::max(worst_cold, std::abs(cold - direct) / std::abs(direct));

        const double hot = potential_finite_t(*jet, pol, 50.0).total;
        const double classical = potential_classical(*jet, pol.alpha0).total;
        worst_hot =
            std::max(worst_hot, std::abs(hot - classical) / std::abs(classical));
    }

    double worst_bridge = 0.0;
    const double length = 0.7;
    for (double x : {0.1, 1.0, 10.0}) {
        const double tau = std::numbers::pi / (x * length);
        const double bridged = potential_london(sphere, pol.alpha0, length, tau).total;
        const double classical = potential_classical(sphere, pol.alpha0).total;
        const double want = x * std::cosh(x) / std::sinh(x);
        worst_bridge = std::max(worst_bridge, std::abs(bridged / classical - want));
    }
    const bool pass = worst_cold <= 1e-3 && worst_hot <= 1e-6 && worst_bridge <= 1e-12;
    report(9, "regime consistency", pass, t.seconds(),
           "cold gap " + num(worst_cold) + " rel, hot gap " + num(worst_hot) +
               " rel, bridge gap " + num(worst_bridge));
}

// 10. Symmetries: frame rotation, curvature/tensor exchange, principal-frame
// round trip, and the breakdown summing to the total.
void criterion_symmetry() {
    Timer t;
    SurfaceJet jet;
    jet.hxx = 0.21; jet.hxy = -0.05; jet.hyy = 0.09;
    jet.hxxx = 0.04; jet.hxxy = -0.02; jet.hxyy = 0.013; jet.hyyy = -0.008;
    jet.hxxxx = 0.03; jet.hxxxy = 0.011; jet.hxxyy = -0.017; jet.hxyyy = 0.006;
    jet.hyyyy = 0.021;
    Mat3 alpha = Mat3::diagonal(0.9, 0.5, 1.3);
    alpha(0, 1) = alpha(1, 0) = 0.21;
    alpha(0, 2) = alpha(2, 0) = 0.07;
    alpha(1, 2) = alpha(2, 1) = -0.12;

    const double base = potential_retarded(jet, alpha).total;
    double rotation_gap = 0.0;
    for (double angle : {0.4, 1.2, -0.9}) {
        const double turned =
            potential_retarded(rotate_jet(jet, angle), rotate_inplane(alpha, angle))
                .total;
        rotation_gap = std::max(rotation_gap, std::abs(turned - base));
    }

    SurfaceJet pj, qj;
    pj.hxx = 0.23; pj.hyy = 0.11;
    qj.hxx = 0.11; qj.hyy = 0.23;
    const Mat3 a1 = Mat3::diagonal(0.9, 0.5, 1.3);
    const Mat3 a2 = Mat3::diagonal(0.5, 0.9, 1.3);
    const bool exchange_exact =
        potential_retarded(pj, a1).total == potential_retarded(qj, a2).total &&
        potential_classical(pj, a1).total == potential_classical(qj, a2).total;

    SurfaceJet diag;
    diag.hxx = 0.31; diag.hyy = 0.12;
    const double theta = 0.4;
    const PrincipalFrame f = principal_frame(rotate_jet(diag, -theta));
    const double round_gap =
        std::max({std::abs(f.kappa1 - 0.31), std::abs(f.kappa2 - 0.12),
                  std::abs(f.angle - theta)});

    Polarizability fixed;
    fixed.alpha0 = alpha;
    Polarizability resonant = fixed;
    resonant.model = Polarizability::Model::two_state;
    resonant.resonance_length = 0.7;
    const PotentialResult results[] = {
        potential_retarded(jet, alpha), potential_classical(jet, alpha),
        potential_t0(jet, fixed), potential_finite_t(jet, resonant, 0.8),
        potential_london(jet, alpha, 0.7, 1.0)};
    double additivity_gap = 0.0;
    for (const PotentialResult& r : results) {
        const double sum = r.flat + r.linear_curvature + r.curvature_gradient +
                           r.quadratic_curvature;
        additivity_gap = std::max(
            additivity_gap, std::abs(r.total - sum) / std::max(1.0, std::abs(r.total)));
    }

    const bool pass = rotation_gap <= 1e-10 && exchange_exact &&
                      round_gap <= 1e-8 && additivity_gap <= 1e-12;
    report(10, "symmetry suite", pass, t.seconds(),
           "rotation gap " + num(rotation_gap) + ", exchange " +
               (exchange_exact ? "exact" : "broken") + ", round trip gap " +
               num(round_gap) + ", additivity gap " + num(additivity_gap));
}

}  // namespace

int main() {
    std::printf("acceptance battery, library version %s\n\n", version_string);
    criterion_classical();
    criterion_moments();
    criterion_corruption();
    criterion_order0();
    criterion_order1();
    criterion_order2();
    criterion_translation();
    criterion_cylinder();
    criterion_regimes();
    criterion_symmetry();
    std::printf("\n%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
