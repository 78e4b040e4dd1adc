#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cpdex/rational.hpp"
#include "cpdex/specfun.hpp"

namespace cpdex {

// The interaction strength splits into eleven frequency-dependent coefficient
// functions beta_q^(p)(xi), indexed by the derivative order p of the height
// profile they multiply (0, 2, 3, 4) and a slot q within that order. Each is
//   beta(xi) = P(xi) e^{-2 xi} + Q(xi) Ei(-2 xi),  Ei(-2 xi) = -E1(2 xi),
// with polynomial P, Q. Slot (4,2) of the source table is corrupted (its
// integral moment is off by three orders of magnitude); the shipped default
// for that slot was re-fitted against the scattering computation with the
// constant term and the integral moment pinned to their independently known
// exact values. The printed row is retained behind a flag for diagnostics.

struct BetaId {
    int p, q;
};

inline constexpr std::array<BetaId, 11> beta_slots = {
    {{0, 1}, {0, 2}, {2, 1}, {2, 2}, {2, 3}, {3, 1}, {4, 1}, {4, 2}, {4, 3}, {4, 4}, {4, 5}}};

enum class BetaProvenance { tabulated, recovered };

struct BetaRow {
    int p = 0, q = 0;
    std::vector<Rational> exp_poly;  // multiplies e^{-2 xi}
    std::vector<Rational> ei_poly;   // multiplies -E1(2 xi)
};

namespace detail {

inline const std::vector<BetaRow>& tabulated_rows() {
    using R = Rational;
    static const std::vector<BetaRow> rows = {
        {0, 1, {R(1, 8), R(1, 4), R(1, 2)}, {}},
        {0, 2, {R(1, 4), R(1, 2)}, {}},
        {2, 1, {R(-3, 32), R(-3, 16), R(-3, 16), R(-1, 8)}, {R(0), R(0), R(0), R(0), R(-1, 4)}},
        {2, 2, {R(-1, 16), R(-1, 8), R(1, 8), R(-1, 4)}, {R(0), R(0), R(1), R(0), R(-1, 2)}},
        {2, 3, {R(-3, 32), R(-3, 16), R(-1, 16), R(1, 8)}, {R(0), R(0), R(0), R(0), R(1, 4)}},
        {3, 1, {R(1, 32), R(1, 16), R(-1, 16), R(1, 8)}, {R(0), R(0), R(-1, 2), R(0), R(1, 4)}},
        {4, 1,
         {R(1, 128), R(1, 64), R(5, 128), R(11, 192), R(1, 192), R(-1, 96)},
         {R(0), R(0), R(0), R(0), R(1, 8), R(0), R(-1, 48)}},
        {4, 2,
         {R(-1, 64), R(-271, 480), R(-259, 960), R(91, 160), R(7, 480), R(-7, 240)},
         {R(0), R(0), R(0), R(0), R(2400, 7), R(0), R(-120, 7)}},
        {4, 3,
         {R(5, 64), R(5, 32), R(-3, 64), R(35, 96), R(1, 96), R(-1, 48)},
         {R(0), R(0), R(0), R(0), R(3, 4), R(0), R(-1, 24)}},
        {4, 4,
         {R(3, 32), R(109, 240), R(-59, 480), R(73, 240), R(7, 240), R(-7, 120)},
         {R(0), R(0), R(0), R(0), R(2, 3), R(0), R(-7, 60)}},
        {4, 5,
         {R(3, 32), R(3, 16), R(-9, 32), R(25, 48), R(-1, 48), R(1, 24)},
         {R(0), R(0), R(0), R(0), R(1), R(0), R(1, 12)}},
    };
    return rows;
}

// Re-fitted slot (4,2). The constant term is the exact -1/64 from the static
// limit; the remaining exponential-part coefficients (xi..xi^5) and the
// -E1-part coefficients (xi^2, xi^4, xi^6) were fitted to the scattering
// computation under the exact moment constraint (integral of the row equals
// -1/120) and then frozen here.
inline constexpr double recovered_42_exp[6] = {
    -0.015625,  // -1/64, pinned
    -0.56850411805697498,
    -0.34702724878021224,
    0.8989886228300803,
    0.17509529699259518,
    -0.35730270859039581,
};
inline constexpr double recovered_42_ei[7] = {
    0.0, 0.0, -2.0623666937654237, 0.0, 2.111313587354275, 0.0, -0.71517665661026864,
};

inline const BetaRow& find_row(int p, int q) {
    for (const auto& r : tabulated_rows())
        if (r.p == p && r.q == q) return r;
    throw std::invalid_argument("beta: no such slot (" + std::to_string(p) + "," +
                                std::to_string(q) + ")");
}

inline double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

}  // namespace detail

inline BetaProvenance beta_provenance(int p, int q) {
    detail::find_row(p, q);
    return (p == 4 && q == 2) ? BetaProvenance::recovered : BetaProvenance::tabulated;
}

// Row as printed in the source table, exact coefficients.
inline const BetaRow& beta_row_verbatim(int p, int q) { return detail::find_row(p, q); }

// Shipped coefficient row in double precision; slot (4,2) is the recovered fit
// unless verbatim_42 requests the printed row.
struct BetaRowNumeric {
    std::vector<double> exp_poly;
    std::vector<double> ei_poly;
};

inline BetaRowNumeric beta_row_numeric(int p, int q, bool verbatim_42 = false) {
    if (p == 4 && q == 2 && !verbatim_42) {
        return {{std::begin(detail::recovered_42_exp), std::end(detail::recovered_42_exp)},
                {std::begin(detail::recovered_42_ei), std::end(detail::recovered_42_ei)}};
    }
    const BetaRow& row = detail::find_row(p, q);
    BetaRowNumeric out;
    for (const auto& c : row.exp_poly) out.exp_poly.push_back(to_double(c));
    for (const auto& c : row.ei_poly) out.ei_poly.push_back(to_double(c));
    return out;
}

struct BetaParts {
    double exp_part = 0.0;
    double ei_part = 0.0;
    double value() const { return exp_part + ei_part; }
};

inline BetaParts beta_parts(int p, int q, double xi, bool verbatim_42 = false) {
    if (xi < 0.0) throw std::domain_error("beta: xi must be nonnegative");
    const auto row = beta_row_numeric(p, q, verbatim_42);
    BetaParts out;
    if (xi == 0.0) {
        // the -E1 factor diverges only logarithmically while its polynomial
        // starts at xi^2, so the second term vanishes in the limit
        out.exp_part = row.exp_poly.empty() ? 0.0 : row.exp_poly[0];
        return out;
    }
    out.exp_part = detail::poly_eval(row.exp_poly, xi) * std::exp(-2.0 * xi);
    out.ei_part = -detail::poly_eval(row.ei_poly, xi) * e1(2.0 * xi);
    return out;
}

inline double beta(int p, int q, double xi, bool verbatim_42 = false) {
    return beta_parts(p, q, xi, verbatim_42).value();
}

// Static (xi = 0) value, exact. The recovered slot's constant term is pinned
// to the same exact value, so this is verbatim-independent.
inline Rational beta_classical(int p, int q) {
    return detail::find_row(p, q).exp_poly.at(0);
}

// Integral of the verbatim row over [0, inf), exact via the closed moments of
// x^n e^{-2x} and x^n E1(2x).
inline Rational beta_moment_verbatim(int p, int q) {
    const BetaRow& row = detail::find_row(p, q);
    Rational m(0);
    for (std::size_t n = 0; n < row.exp_poly.size(); ++n)
        m += row.exp_poly[n] * poly_exp_moment(static_cast<int>(n));
    for (std::size_t n = 0; n < row.ei_poly.size(); ++n)
        m -= row.ei_poly[n] * poly_e1_moment(static_cast<int>(n));
    return m;
}

// Integral of the shipped row. For (4,2) the fit enforces the exact moment as
// an equality constraint, so the value is -1/120 by construction.
inline Rational beta_moment(int p, int q) {
    if (p == 4 && q == 2) return Rational(-1, 120);
    return beta_moment_verbatim(p, q);
}

// Coefficients of the closed-form zero-temperature potential, one per brace
// term. The frequency integral carries a 1/(2*pi) prefactor; quoting the
// result against a 1/pi prefactor leaves moment/2 per slot. The two "diff"
// slots carry a further 1/2 from writing the traceless contraction as a
// difference of in-plane components.
struct RetardedCoefficients {
    Rational flat_perp, flat_zz;
    Rational linear_perp, linear_zz, linear_diff;
    Rational gradient;
    Rational square_sum_perp, square_sum_zz;
    Rational square_each_perp, square_each_zz;
    Rational square_diff;
};

inline RetardedCoefficients moment_mapping() {
    const Rational half(1, 2);
    return RetardedCoefficients{
        beta_moment(0, 1) * half,        beta_moment(0, 2) * half,
        beta_moment(2, 1) * half,        beta_moment(2, 2) * half,
        beta_moment(2, 3) * half * half, beta_moment(3, 1) * half,
        beta_moment(4, 1) * half,        beta_moment(4, 2) * half,
        beta_moment(4, 3) * half,        beta_moment(4, 4) * half,
        beta_moment(4, 5) * half * half};
}

}  // namespace cpdex
