#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "cpdex/specfun.hpp"

namespace cpdex::oracle {

// Independent cross-check of the tabulated coefficient functions.  The
// coefficients are recomputed from first principles: the momentum-space
// reflection kernel of a perfectly conducting surface is expanded in powers
// of a small height deformation, and the coefficient of each deformation
// monomial is read off with finite-difference stencils in the transverse
// momenta.  Nothing in this header reads the shipped table, so agreement
// between the two is a genuine consistency statement.
//
// All lengths are measured in units of the reference separation, so the
// frequency variable xi and the momenta are dimensionless.  The separation
// parameter `a` is 1 except where a kernel is deliberately evaluated at a
// displaced reference plane.

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Complex 3x3 matrix, row major.  The kernels are Hermitian only up to
// quadrature noise, so entries stay complex and callers take the real or
// imaginary part appropriate to the channel.
struct Mat3c {
    std::array<std::complex<double>, 9> m{};

    std::complex<double>& operator()(int r, int c) { return m[3 * r + c]; }
    const std::complex<double>& operator()(int r, int c) const { return m[3 * r + c]; }

    Mat3c& operator+=(const Mat3c& o) {
        for (int i = 0; i < 9; ++i) m[i] += o.m[i];
        return *this;
    }
    Mat3c& operator-=(const Mat3c& o) {
        for (int i = 0; i < 9; ++i) m[i] -= o.m[i];
        return *this;
    }
    friend Mat3c operator+(Mat3c l, const Mat3c& r) { return l += r; }
    friend Mat3c operator-(Mat3c l, const Mat3c& r) { return l -= r; }
    friend Mat3c operator*(double s, Mat3c v) {
        for (auto& e : v.m) e *= s;
        return v;
    }

    double max_abs() const {
        double best = 0.0;
        for (const auto& e : m) best = std::max(best, std::abs(e));
        return best;
    }
};

// Quadrature controls for the plane integrals.  Both tolerances are
// absolute: radial per ray, angular per polar chart.  A relative floor of a
// few ulps stops the recursion from chasing roundoff on large integrands.
struct OracleSpec {
    double radial_abs_tol = 1e-13;
    double angular_tol = 1e-12;
    double radial_cutoff = 40.0;
};

namespace detail {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;

// C-infinity cutoff: 1 below half the window radius, 0 outside it.  Built
// from the standard exp(-1/s) mollifier so every radial derivative vanishes
// at both ends of the transition.
inline double bump_side(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

inline double window(double r, double r_out) {
    const double r_core = 0.5 * r_out;
    if (r <= r_core) return 1.0;
    if (r >= r_out) return 0.0;
    const double s = (r - r_core) / (r_out - r_core);
    const double up = bump_side(1.0 - s);
    return up / (up + bump_side(s));
}

// Gauss-Kronrod 7/15 panel for matrix integrands, sharing the scalar
// abscissae.  The error is the raw Kronrod-Gauss gap in the max-abs entry
// norm, which overestimates smooth-panel error and therefore only costs
// extra splits, never accuracy.
template <typename F>
void mat_gk15(F&& f, double lo, double hi, Mat3c& value, double& error) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const Mat3c fc = f(c);
    Mat3c kron = cpdex::detail::gk15_wk[7] * fc;
    Mat3c gauss = cpdex::detail::gk15_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const Mat3c pair =
            f(c - h * cpdex::detail::gk15_x[j]) + f(c + h * cpdex::detail::gk15_x[j]);
        kron += cpdex::detail::gk15_wk[j] * pair;
        if (j % 2 == 1) gauss += cpdex::detail::gk15_wg[(j - 1) / 2] * pair;
    }
    value = h * kron;
    error = std::abs(h) * (kron - gauss).max_abs();
}

// Shared bisection recursion for radial rays and angular sweeps.  The
// tolerance budget halves per split, but a panel that cannot improve (a few
// ulps of its value, the depth cap, or a vanishing width) is accepted with
// its error charged to the running account; the caller audits the total, so
// isolated stubborn panels never abort an otherwise converged integral.
template <typename F>
void interval_adaptive(F&& f, double lo, double hi, double tol, int depth, Mat3c& acc,
                       double& err_acc) {
    Mat3c value;
    double error = 0.0;
    mat_gk15(f, lo, hi, value, error);
    if (error <= tol || error <= 4e-16 * value.max_abs() || depth >= 28 ||
        hi - lo < 1e-13) {
        acc += value;
        err_acc += error;
        return;
    }
    const double mid = 0.5 * (lo + hi);
    interval_adaptive(f, lo, mid, 0.5 * tol, depth + 1, acc, err_acc);
    interval_adaptive(f, mid, hi, 0.5 * tol, depth + 1, acc, err_acc);
}

template <typename F>
Mat3c interval_integrate(F&& f, double lo, double hi, double tol, double& err_acc) {
    Mat3c acc;
    interval_adaptive(f, lo, hi, tol, 0, acc, err_acc);
    return acc;
}

// Angular integral over [0, 2 pi) split at the seed angles, each panel
// holding a share of the budget proportional to its width.  Seeds mark the
// tangent directions of the excision windows, whose edges are smooth but
// sharp enough to defeat uniform grids.
template <typename F>
Mat3c angular_sweep(F&& ray, std::vector<double> seeds, double tol, double& err_acc) {
    seeds.push_back(0.0);
    seeds.push_back(two_pi);
    std::sort(seeds.begin(), seeds.end());
    Mat3c total;
    for (std::size_t i = 0; i + 1 < seeds.size(); ++i) {
        const double width = seeds[i + 1] - seeds[i];
        if (width < 1e-12) continue;
        total += interval_integrate(ray, seeds[i], seeds[i + 1], tol * width / two_pi,
                                    err_acc);
    }
    return total;
}

// Integral of f over the momentum plane.  The integrand may be direction
// discontinuous at the origin (handled exactly by polar rays) and at the
// listed marks, which are excised with a smooth partition of unity and
// integrated in their own polar charts.  Window radii stay clear of the
// origin and of each other so the partition weights never overlap.
template <typename F>
Mat3c integrate_plane(F&& f, const std::vector<Vec2>& marks, const OracleSpec& spec) {
    std::vector<Vec2> centers;
    for (const Vec2& b : marks) {
        if (norm(b) < 1e-12) continue;
        bool seen = false;
        for (const Vec2& c : centers)
            seen = seen || std::hypot(b.x - c.x, b.y - c.y) < 1e-12;
        if (!seen) centers.push_back(b);
    }
    std::vector<double> r_out(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        double gap = norm(centers[i]);
        for (std::size_t j = 0; j < centers.size(); ++j)
            if (j != i)
                gap = std::min(gap, std::hypot(centers[i].x - centers[j].x,
                                               centers[i].y - centers[j].y));
        r_out[i] = 0.4 * gap;
    }

    auto complement = [&](Vec2 k) {
        double w = 1.0;
        for (std::size_t i = 0; i < centers.size(); ++i)
            w -= window(std::hypot(k.x - centers[i].x, k.y - centers[i].y), r_out[i]);
        return w;
    };

    std::vector<double> seeds;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double phi = std::atan2(centers[i].y, centers[i].x);
        const double half = std::asin(std::min(1.0, r_out[i] / norm(centers[i])));
        for (double edge : {phi - half, phi + half}) {
            double wrapped = std::fmod(edge + two_pi, two_pi);
            if (wrapped > 0.0 && wrapped < two_pi) seeds.push_back(wrapped);
        }
    }

    double err_acc = 0.0;
    double radial_worst = 0.0;
    Mat3c total = angular_sweep(
        [&](double th) {
            const double cx = std::cos(th), sy = std::sin(th);
            // Split the ray where it crosses each window rim and core edge.
            // The excision dip is far narrower than the full radial range, so
            // without these cuts a coarse panel's nodes can straddle it
            // unsampled, and the gap estimate never learns it exists.
            std::vector<double> cuts{0.0, spec.radial_cutoff};
            for (std::size_t i = 0; i < centers.size(); ++i) {
                const double along = cx * centers[i].x + sy * centers[i].y;
                const double d2 = centers[i].x * centers[i].x +
                                  centers[i].y * centers[i].y - along * along;
                for (double radius : {r_out[i], 0.5 * r_out[i]}) {
                    if (d2 >= radius * radius) continue;
                    const double s = std::sqrt(radius * radius - d2);
                    for (double t : {along - s, along + s})
                        if (t > 0.0 && t < spec.radial_cutoff) cuts.push_back(t);
                }
            }
            std::sort(cuts.begin(), cuts.end());
            double radial_err = 0.0;
            Mat3c ray;
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
                if (cuts[j + 1] - cuts[j] < 1e-13) continue;
                ray += interval_integrate(
                    [&](double r) {
                        const Vec2 k{r * cx, r * sy};
                        const double w = complement(k);
                        if (w == 0.0) return Mat3c{};
                        return (r * w) * f(k);
                    },
                    cuts[j], cuts[j + 1], spec.radial_abs_tol, radial_err);
            }
            radial_worst = std::max(radial_worst, radial_err);
            return ray;
        },
        seeds, spec.angular_tol, err_acc);

    for (std::size_t i = 0; i < centers.size(); ++i) {
        const Vec2 c = centers[i];
        const double rw = r_out[i];
        total += angular_sweep(
            [&](double th) {
                const double cx = std::cos(th), sy = std::sin(th);
                double radial_err = 0.0;
                Mat3c ray = interval_integrate(
                    [&](double r) {
                        const Vec2 k{c.x + r * cx, c.y + r * sy};
                        return (r * window(r, rw)) * f(k);
                    },
                    0.0, rw, spec.radial_abs_tol, radial_err);
                radial_worst = std::max(radial_worst, radial_err);
                return ray;
            },
            {}, spec.angular_tol, err_acc);
    }

    // End audit: raw Kronrod gaps overestimate smooth-panel errors by orders
    // of magnitude, so the threshold is deliberately loose.  It still trips
    // on a genuinely unresolved feature, whose gap stays near the feature's
    // own magnitude rather than near roundoff.
    const double budget = err_acc + two_pi * radial_worst;
    if (budget > 1e-7 * std::max(1.0, total.max_abs()))
        throw ConvergenceError("plane quadrature failed to resolve", budget);
    return total;
}

}  // namespace detail

// Propagation data of one plane-wave leg: transverse magnitude, direction,
// and the imaginary-frequency axial wavenumber q = sqrt(k^2 + xi^2).  The
// direction of a zero vector is immaterial (such points are excised or sit
// at ray ends); x-hat keeps the arithmetic finite.
struct Ray {
    double k;
    Vec2 hat;
    double q;
};

inline Ray make_ray(Vec2 v, double xi) {
    const double k = std::hypot(v.x, v.y);
    const Vec2 hat = k > 0.0 ? Vec2{v.x / k, v.y / k} : Vec2{1.0, 0.0};
    return {k, hat, std::sqrt(k * k + xi * xi)};
}

enum class Pol { E, M };

using CVec3 = std::array<std::complex<double>, 3>;

// Outgoing polarization vector, scaled so the xi -> 0 limit stays finite:
// the electric one is -(i k zhat + q khat), the magnetic one zhat x khat.
inline CVec3 up_vector(Pol p, const Ray& r) {
    if (p == Pol::E)
        return {{{-r.q * r.hat.x, 0.0}, {-r.q * r.hat.y, 0.0}, {0.0, -r.k}}};
    return {{{-r.hat.y, 0.0}, {r.hat.x, 0.0}, {0.0, 0.0}}};
}

// Incoming counterpart, -(i k zhat - q khat); the magnetic vector does not
// distinguish the propagation sense.
inline CVec3 down_vector(Pol p, const Ray& r) {
    if (p == Pol::E)
        return {{{r.q * r.hat.x, 0.0}, {r.q * r.hat.y, 0.0}, {0.0, -r.k}}};
    return {{{-r.hat.y, 0.0}, {r.hat.x, 0.0}, {0.0, 0.0}}};
}

// Polarization mixing amplitude of one reflection off the flat conductor,
// first index on the incoming ray, second on the outgoing one.  Electric
// legs carry 1/q of their own ray.
inline double mix_entry(Pol in, Pol out, const Ray& ri, const Ray& ro, double xi) {
    const double cos_io = ri.hat.x * ro.hat.x + ri.hat.y * ro.hat.y;
    const double sin_io = ri.hat.x * ro.hat.y - ri.hat.y * ro.hat.x;
    if (in == Pol::E && out == Pol::E)
        return (cos_io * xi * xi + ri.k * ro.k) / (ri.q * ro.q);
    if (in == Pol::E && out == Pol::M) return (xi / ri.q) * sin_io;
    if (in == Pol::M && out == Pol::E) return (xi / ro.q) * sin_io;
    return -cos_io;
}

namespace detail {

inline double xi_power(double xi, int n) { return n == 0 ? 1.0 : std::pow(xi, n); }

inline int e_count(Pol a, Pol b) {
    return (a == Pol::E ? 1 : 0) + (b == Pol::E ? 1 : 0);
}

constexpr Pol pols[2] = {Pol::E, Pol::M};

}  // namespace detail

// Single-reflection vertex between transverse momenta k (incoming) and kp
// (outgoing), as a Cartesian 3x3 matrix over the polarization vectors.  Each
// electric leg trades one power of xi for the scaling absorbed into the
// vectors, keeping every channel finite on the whole frequency axis.
inline Mat3c scattering_matrix(Vec2 k, Vec2 kp, double xi) {
    const Ray ri = make_ray(k, xi);
    const Ray ro = make_ray(kp, xi);
    Mat3c out;
    for (Pol q : detail::pols) {
        const CVec3 dn = down_vector(q, ri);
        for (Pol qp : detail::pols) {
            const double w = detail::two_pi *
                             detail::xi_power(xi, 2 - detail::e_count(q, qp)) *
                             mix_entry(q, qp, ri, ro, xi);
            if (w == 0.0) continue;
            const CVec3 up = up_vector(qp, ro);
            for (int mu = 0; mu < 3; ++mu)
                for (int nu = 0; nu < 3; ++nu) out(mu, nu) += w * up[mu] * dn[nu];
        }
    }
    return out;
}

// Two-reflection vertex through the intermediate momentum km.  The
// intermediate polarization sum carries the conductor's sign split between
// electric and magnetic channels; only the outer legs carry xi scalings.
inline Mat3c two_bounce_matrix(Vec2 ka, Vec2 km, Vec2 kb, double xi) {
    const Ray ri = make_ray(ka, xi);
    const Ray rm = make_ray(km, xi);
    const Ray ro = make_ray(kb, xi);
    Mat3c out;
    for (Pol q : detail::pols) {
        const CVec3 dn = down_vector(q, ri);
        for (Pol qp : detail::pols) {
            double amp = 0.0;
            for (Pol r : detail::pols) {
                const double sign = r == Pol::E ? 1.0 : -1.0;
                amp += mix_entry(q, r, ri, rm, xi) * sign * mix_entry(r, qp, rm, ro, xi);
            }
            const double w = detail::two_pi *
                             detail::xi_power(xi, 2 - detail::e_count(q, qp)) * amp;
            if (w == 0.0) continue;
            const CVec3 up = up_vector(qp, ro);
            for (int mu = 0; mu < 3; ++mu)
                for (int nu = 0; nu < 3; ++nu) out(mu, nu) += w * up[mu] * dn[nu];
        }
    }
    return out;
}

// Flat-surface kernel at separation a: diagonal, with equal transverse
// entries.  Closed forms, their separation derivative, and a direct
// quadrature of the defining axial integrals for cross-checks.
struct FlatKernel {
    double xx = 0.0;
    double zz = 0.0;
};

inline FlatKernel flat_kernel(double xi, double a = 1.0) {
    const double e = std::exp(-2.0 * a * xi);
    const double xx = 0.5 * e * (xi * xi / a + 0.5 * xi / (a * a) + 0.25 / (a * a * a));
    const double zz = e * (0.5 * xi / (a * a) + 0.25 / (a * a * a));
    return {xx, zz};
}

inline FlatKernel flat_kernel_slope(double xi, double a = 1.0) {
    const double e = std::exp(-2.0 * a * xi);
    const double a2 = a * a, a3 = a2 * a, a4 = a2 * a2;
    const double pxx = xi * xi / a + 0.5 * xi / a2 + 0.25 / a3;
    const double dxx = -xi * xi / a2 - xi / a3 - 0.75 / a4;
    const double pzz = 0.5 * xi / a2 + 0.25 / a3;
    const double dzz = -xi / a3 - 0.75 / a4;
    return {0.5 * e * (-2.0 * xi * pxx + dxx), e * (-2.0 * xi * pzz + dzz)};
}

inline FlatKernel flat_kernel_quadrature(double xi, double a = 1.0) {
    auto fxx = [=](double q) { return 0.5 * std::exp(-2.0 * a * q) * (q * q + xi * xi); };
    auto fzz = [=](double q) { return std::exp(-2.0 * a * q) * (q * q - xi * xi); };
    return {integrate_decaying(fxx, xi).value, integrate_decaying(fzz, xi).value};
}

// First deformation order of the reflection kernel at transverse momentum
// transfer p.  At p = 0 it equals the separation derivative of the flat
// kernel, which pins the normalization.
inline Mat3c first_order_kernel(Vec2 p, double xi, double a = 1.0,
                                const OracleSpec& spec = {}) {
    auto f = [=](Vec2 k) {
        const Vec2 kp{k.x - p.x, k.y - p.y};
        const double expo = make_ray(k, xi).q + make_ray(kp, xi).q;
        return std::exp(-a * expo) * scattering_matrix(k, kp, xi);
    };
    const Mat3c raw = detail::integrate_plane(f, {p}, spec);
    return (1.0 / (2.0 * detail::pi * detail::pi)) * raw;
}

namespace detail {

// Half of the second order: one loop momentum, two reflections, deformation
// momenta p1 entering and p2 leaving.  Only the outer legs sit in the
// exponential; the loop leg contributes the 2 q measure factor.
template <typename SpecT>
Mat3c one_bounce(Vec2 p1, Vec2 p2, double xi, double a, const SpecT& spec) {
    auto f = [=](Vec2 k) {
        const Vec2 ka{k.x + p1.x, k.y + p1.y};
        const Vec2 kb{k.x - p2.x, k.y - p2.y};
        const double qa = make_ray(ka, xi).q;
        const double qb = make_ray(kb, xi).q;
        const double qm = make_ray(k, xi).q;
        return (2.0 * qm * std::exp(-a * (qa + qb))) * two_bounce_matrix(ka, k, kb, xi);
    };
    const Mat3c raw =
        integrate_plane(f, {{-p1.x, -p1.y}, {p2.x, p2.y}}, spec);
    return (1.0 / (4.0 * pi * pi)) * raw;
}

}  // namespace detail

// Second deformation order, symmetrized over the two momentum transfers.
// Its value at p2 = 0 is the separation derivative of the first order, the
// translation identity used as an internal consistency gate.
inline Mat3c second_order_kernel(Vec2 p1, Vec2 p2, double xi, double a = 1.0,
                                 const OracleSpec& spec = {}) {
    const Mat3c j12 = detail::one_bounce(p1, p2, xi, a, spec);
    const Mat3c j21 = detail::one_bounce(p2, p1, xi, a, spec);
    return -1.0 * (j12 + j21);
}

// Momentum stencils.
//
// Small-momentum coefficients of the first-order kernel.  The diagonal
// entries are even in p with the curvature coefficient on p^2; the zx and xz
// entries are odd and purely imaginary, and their p^3 coefficients carry the
// curvature-gradient term.  At zero frequency the zz channel keeps an odd
// |p|-type remainder beyond the extracted order, so each reduced stencil is
// evaluated at three step sizes {u, u/2, u/4} and combined to cancel both a
// linear and a quadratic error term; for analytic kernels the same weights
// still cancel the quadratic term and lose nothing.
struct LowOrderCoefficients {
    double b21 = 0.0;
    double b22 = 0.0;
    double b23 = 0.0;
    double b3 = 0.0;
    double curvature_xx = 0.0;
    double curvature_yy = 0.0;
    double curvature_zz = 0.0;
    // largest real part seen in the odd entries and imaginary part in the
    // even ones; quadrature noise only, of order the radial tolerance
    double parity_residual = 0.0;
};

namespace detail {

// Cancels linear and quadratic error terms across step sizes s, s/2, s/4.
inline double eliminate12(double coarse, double mid, double fine) {
    return (8.0 * fine - 6.0 * mid + coarse) / 3.0;
}

}  // namespace detail

inline LowOrderCoefficients extract_low_order(double xi, const OracleSpec& spec = {},
                                              double u = 0.05) {
    const Mat3c g0 = first_order_kernel({0.0, 0.0}, xi, 1.0, spec);
    const Mat3c gq = first_order_kernel({0.25 * u, 0.0}, xi, 1.0, spec);
    const Mat3c gh = first_order_kernel({0.5 * u, 0.0}, xi, 1.0, spec);
    const Mat3c gu = first_order_kernel({u, 0.0}, xi, 1.0, spec);
    const Mat3c g2u = first_order_kernel({2.0 * u, 0.0}, xi, 1.0, spec);

    auto curvature = [&](int r, int c) {
        auto chat = [&](const Mat3c& g, double s) {
            return 2.0 * (g(r, c).real() - g0(r, c).real()) / (s * s);
        };
        return detail::eliminate12(chat(gu, u), chat(gh, 0.5 * u), chat(gq, 0.25 * u));
    };
    const double cxx = curvature(0, 0);
    const double cyy = curvature(1, 1);
    const double czz = curvature(2, 2);

    auto cubic = [&](int r, int c) {
        auto shat = [&](double s, double odd_two, double odd_one) {
            return (odd_two - 2.0 * odd_one) / (6.0 * s * s * s);
        };
        return detail::eliminate12(shat(u, g2u(r, c).imag(), gu(r, c).imag()),
                                   shat(0.5 * u, gu(r, c).imag(), gh(r, c).imag()),
                                   shat(0.25 * u, gh(r, c).imag(), gq(r, c).imag()));
    };
    const double s3zx = cubic(2, 0);
    const double s3xz = cubic(0, 2);

    double resid = 0.0;
    for (const Mat3c* g : {&g0, &gq, &gh, &gu, &g2u}) {
        resid = std::max({resid, std::abs((*g)(2, 0).real()), std::abs((*g)(0, 2).real()),
                          std::abs((*g)(0, 0).imag()), std::abs((*g)(1, 1).imag()),
                          std::abs((*g)(2, 2).imag())});
    }

    LowOrderCoefficients out;
    out.curvature_xx = cxx;
    out.curvature_yy = cyy;
    out.curvature_zz = czz;
    out.b21 = -0.25 * (cxx + cyy);
    out.b22 = -0.5 * czz;
    out.b23 = 0.5 * (cyy - cxx);
    out.b3 = -(s3zx + s3xz);
    out.parity_residual = resid;
    return out;
}

// Fourth-order coefficients from the second-order kernel.  A product of
// second-difference stencils in the two momentum transfers isolates the
// s^2 t^2 coefficient; transfers along the same axis and along orthogonal
// axes give independent linear combinations of the five coefficients, and
// the in-plane channels are averaged where symmetry makes them redundant.
// The zz channel develops an odd |p|-type remainder near zero frequency, so
// the raw stencils run at step sizes {h, h/2, h/4} and are combined to
// cancel linear and quadratic error terms at once.
struct QuadraticCoefficients {
    double b41 = 0.0;
    double b42 = 0.0;
    double b43 = 0.0;
    double b44 = 0.0;
    double b45 = 0.0;
    // raw mixed fourth derivatives per diagonal channel (xx, yy, zz)
    std::array<double, 3> parallel{};
    std::array<double, 3> crossed{};
};

namespace detail {

inline double d4_parallel(const Mat3c& fhh, const Mat3c& fhm, const Mat3c& fh0,
                          const Mat3c& f0h, const Mat3c& f00, double s, int i) {
    const double s4 = s * s * s * s;
    return (2.0 * fhh(i, i).real() + 2.0 * fhm(i, i).real() - 4.0 * fh0(i, i).real() -
            4.0 * f0h(i, i).real() + 4.0 * f00(i, i).real()) /
           s4;
}

inline double d4_crossed(const Mat3c& fhh, const Mat3c& fh0, const Mat3c& f0h,
                         const Mat3c& f00, double s, int i) {
    const double s4 = s * s * s * s;
    return 4.0 *
           (fhh(i, i).real() - fh0(i, i).real() - f0h(i, i).real() + f00(i, i).real()) /
           s4;
}

}  // namespace detail

inline QuadraticCoefficients extract_quadratic(double xi, const OracleSpec& spec = {},
                                               double h = 0.05) {
    auto kern = [&](Vec2 p1, Vec2 p2) {
        return second_order_kernel(p1, p2, xi, 1.0, spec);
    };
    const Vec2 zero{0.0, 0.0};
    const Mat3c f00 = kern(zero, zero);

    std::array<std::array<double, 3>, 3> par_raw{};
    std::array<std::array<double, 3>, 3> cross_raw{};
    for (int lvl = 0; lvl < 3; ++lvl) {
        const double s = h / double(1 << lvl);
        // both transfers along x: jointly even in (s, t)
        const Mat3c ass = kern({s, 0.0}, {s, 0.0});
        const Mat3c asm_ = kern({s, 0.0}, {-s, 0.0});
        const Mat3c as0 = kern({s, 0.0}, zero);
        const Mat3c a0s = kern(zero, {s, 0.0});
        // transfers along x and y: even in each separately
        const Mat3c bss = kern({s, 0.0}, {0.0, s});
        const Mat3c b0s = kern(zero, {0.0, s});
        for (int i = 0; i < 3; ++i) {
            par_raw[lvl][i] = detail::d4_parallel(ass, asm_, as0, a0s, f00, s, i);
            cross_raw[lvl][i] = detail::d4_crossed(bss, as0, b0s, f00, s, i);
        }
    }

    QuadraticCoefficients out;
    for (int i = 0; i < 3; ++i) {
        out.parallel[i] =
            detail::eliminate12(par_raw[0][i], par_raw[1][i], par_raw[2][i]);
        out.crossed[i] =
            detail::eliminate12(cross_raw[0][i], cross_raw[1][i], cross_raw[2][i]);
    }
    const double cross_plane = 0.5 * (out.crossed[0] + out.crossed[1]);
    const double par_plane = 0.5 * (out.parallel[0] + out.parallel[1]);
    out.b41 = cross_plane / 8.0;
    out.b42 = out.crossed[2] / 8.0;
    out.b43 = (par_plane - cross_plane) / 8.0;
    out.b44 = (out.parallel[2] - out.crossed[2]) / 8.0;
    out.b45 = (out.parallel[0] - out.parallel[1]) / 8.0;
    return out;
}

// Cheap path for sampling only the zz crossed coefficient, used to tabulate
// one coefficient function over many frequencies.
inline double extract_b42(double xi, const OracleSpec& spec = {}, double h = 0.05) {
    auto kern = [&](Vec2 p1, Vec2 p2) {
        return second_order_kernel(p1, p2, xi, 1.0, spec);
    };
    const Vec2 zero{0.0, 0.0};
    const Mat3c f00 = kern(zero, zero);
    std::array<double, 3> raw{};
    for (int lvl = 0; lvl < 3; ++lvl) {
        const double s = h / double(1 << lvl);
        const Mat3c bss = kern({s, 0.0}, {0.0, s});
        const Mat3c as0 = kern({s, 0.0}, zero);
        const Mat3c b0s = kern(zero, {0.0, s});
        raw[lvl] = detail::d4_crossed(bss, as0, b0s, f00, s, 2);
    }
    return detail::eliminate12(raw[0], raw[1], raw[2]) / 8.0;
}

// Consistency gates tying the three orders together.  flat_gap compares the
// first-order kernel at zero transfer with the analytic separation slope of
// the flat kernel; first_gap compares a Richardson finite difference of the
// first order in the separation with the second order at zero second
// transfer.  Both are max-abs entry norms.
struct TranslationCheck {
    double flat_gap = 0.0;
    double first_gap = 0.0;
};

inline TranslationCheck translation_check(double xi, double kd, double a = 1.0,
                                          const OracleSpec& spec = {}) {
    const FlatKernel slope = flat_kernel_slope(xi, a);
    Mat3c ref;
    ref(0, 0) = slope.xx;
    ref(1, 1) = slope.xx;
    ref(2, 2) = slope.zz;
    const Mat3c k10 = first_order_kernel({0.0, 0.0}, xi, a, spec);

    const Vec2 p{kd, 0.0};
    auto central = [&](double d) {
        return (0.5 / d) * (first_order_kernel(p, xi, a + d, spec) -
                            first_order_kernel(p, xi, a - d, spec));
    };
    const Mat3c fd = (1.0 / 3.0) * (4.0 * central(0.01) - central(0.02));
    const Mat3c direct = second_order_kernel(p, {0.0, 0.0}, xi, a, spec);

    return {(k10 - ref).max_abs(), (fd - direct).max_abs()};
}

// Reference-plane invariance of the extracted curvature coefficients.  The
// kernels are evaluated at a displaced reference separation a = 1 + eps and
// transported back with a fifth-order Taylor step whose derivative terms
// come from the translation identity.  The stencil run on the transported
// kernels must reproduce the direct extraction at a = 1.  Third order is not
// enough: the eps^4 remainder at eps = 0.1 sits near 3e-5, above the
// invariance tolerance, and the inward shift still leaves ~1e-5 at fourth
// order because every separation derivative grows toward the surface.
struct SplitCoefficients {
    double b21 = 0.0;
    double b22 = 0.0;
    double b23 = 0.0;
};

inline SplitCoefficients split_extract(double xi, double eps,
                                       const OracleSpec& spec = {}, double u = 0.05,
                                       double fd_step = 0.02) {
    const double a = 1.0 + eps;
    auto transported = [&](Vec2 p) {
        const Mat3c f = first_order_kernel(p, xi, a, spec);
        const Mat3c f1 = second_order_kernel(p, {0.0, 0.0}, xi, a, spec);
        const Mat3c fp = second_order_kernel(p, {0.0, 0.0}, xi, a + fd_step, spec);
        const Mat3c fm = second_order_kernel(p, {0.0, 0.0}, xi, a - fd_step, spec);
        const Mat3c fp2 =
            second_order_kernel(p, {0.0, 0.0}, xi, a + 2.0 * fd_step, spec);
        const Mat3c fm2 =
            second_order_kernel(p, {0.0, 0.0}, xi, a - 2.0 * fd_step, spec);
        const Mat3c f2 = (1.0 / (12.0 * fd_step)) *
                         (-1.0 * fp2 + 8.0 * fp - 8.0 * fm + fm2);
        const Mat3c f3 = (1.0 / (12.0 * fd_step * fd_step)) *
                         (-1.0 * fp2 + 16.0 * fp - 30.0 * f1 + 16.0 * fm - fm2);
        const Mat3c f4 = (0.5 / (fd_step * fd_step * fd_step)) *
                         (fp2 - 2.0 * fp + 2.0 * fm - fm2);
        const Mat3c f5 = (1.0 / (fd_step * fd_step * fd_step * fd_step)) *
                         (fp2 - 4.0 * fp + 6.0 * f1 - 4.0 * fm + fm2);
        const double e2 = eps * eps;
        return f - eps * f1 + (0.5 * e2) * f2 - (e2 * eps / 6.0) * f3 +
               (e2 * e2 / 24.0) * f4 - (e2 * e2 * eps / 120.0) * f5;
    };
    const Mat3c t0 = transported({0.0, 0.0});
    const Mat3c th = transported({0.5 * u, 0.0});
    const Mat3c tu = transported({u, 0.0});

    auto curvature = [&](int r, int c) {
        auto chat = [&](const Mat3c& g, double s) {
            return 2.0 * (g(r, c).real() - t0(r, c).real()) / (s * s);
        };
        return (4.0 * chat(th, 0.5 * u) - chat(tu, u)) / 3.0;
    };
    const double cxx = curvature(0, 0);
    const double cyy = curvature(1, 1);
    const double czz = curvature(2, 2);
    return {-0.25 * (cxx + cyy), -0.5 * czz, 0.5 * (cyy - cxx)};
}

// Reconstruction of one coefficient function from frequency samples.  The
// ansatz is a degree-5 polynomial times exp(-2 xi) plus an even polynomial
// (degrees 2, 4, 6) times -E1(2 xi), with the constant pinned to the static
// value and one polynomial coefficient eliminated by the known frequency
// integral, so the fitted row integrates to the closed-form moment exactly.
struct Beta42Recovery {
    std::array<double, 6> exp_coefficients{};
    std::array<double, 7> ei_coefficients{};
    double moment = 0.0;
    double rms_residual = 0.0;
    double max_residual = 0.0;
};

namespace detail {

// dense solve with partial pivoting; n stays tiny so no factorization reuse
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300)
            throw ConvergenceError("singular normal equations", 0.0);
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double factor = a[r * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

}  // namespace detail

inline std::vector<double> beta42_sample_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(0.1 * i);
    for (double x : {2.25, 2.5, 2.75, 3.0}) grid.push_back(x);
    return grid;
}

inline Beta42Recovery recover_beta42(const std::vector<std::pair<double, double>>& samples) {
    constexpr double c0 = -1.0 / 64.0;
    constexpr double target = -1.0 / 1920.0;  // residual moment after the constant
    // exp moments k!/2^(k+1) for k = 0..5 and E1 moments j!/((j+1) 2^(j+1))
    constexpr double em[6] = {0.5, 0.25, 0.25, 0.375, 0.75, 1.875};
    constexpr double nm2 = 1.0 / 12.0, nm4 = 3.0 / 20.0, nm6 = 45.0 / 56.0;
    constexpr int nc = 7;  // free: exp degrees 1..4, E1 degrees 2, 4, 6

    const std::size_t rows = samples.size();
    if (rows < nc)
        throw std::invalid_argument("coefficient recovery needs at least 7 samples");

    std::vector<double> design(rows * nc);
    std::vector<double> rhs(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const double x = samples[i].first;
        const double e = std::exp(-2.0 * x);
        const double es = e1(2.0 * x);
        const double x2 = x * x, x3 = x2 * x, x4 = x2 * x2, x5 = x4 * x;
        const double pivot_col = x5 * e;  // eliminated degree-5 exp column
        design[i * nc + 0] = x * e - (em[1] / em[5]) * pivot_col;
        design[i * nc + 1] = x2 * e - (em[2] / em[5]) * pivot_col;
        design[i * nc + 2] = x3 * e - (em[3] / em[5]) * pivot_col;
        design[i * nc + 3] = x4 * e - (em[4] / em[5]) * pivot_col;
        design[i * nc + 4] = (nm2 / em[5]) * pivot_col - x2 * es;
        design[i * nc + 5] = (nm4 / em[5]) * pivot_col - x4 * es;
        design[i * nc + 6] = (nm6 / em[5]) * pivot_col - x2 * x4 * es;
        rhs[i] = samples[i].second - c0 * e - (target / em[5]) * pivot_col;
    }

    // column-scaled normal equations
    std::array<double, nc> scale{};
    for (int c = 0; c < nc; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += design[i * nc + c] * design[i * nc + c];
        scale[c] = std::sqrt(s);
        for (std::size_t i = 0; i < rows; ++i) design[i * nc + c] /= scale[c];
    }
    std::vector<double> ata(nc * nc, 0.0);
    std::vector<double> atb(nc, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (int r = 0; r < nc; ++r) {
            atb[r] += design[i * nc + r] * rhs[i];
            for (int c = 0; c < nc; ++c)
                ata[r * nc + c] += design[i * nc + r] * design[i * nc + c];
        }
    std::vector<double> x = detail::solve_dense(std::move(ata), std::move(atb));
    for (int c = 0; c < nc; ++c) x[c] /= scale[c];

    Beta42Recovery out;
    out.exp_coefficients = {c0, x[0], x[1], x[2], x[3], 0.0};
    out.ei_coefficients = {0.0, 0.0, x[4], 0.0, x[5], 0.0, x[6]};
    const double a5 = (target - (x[0] * em[1] + x[1] * em[2] + x[2] * em[3] + x[3] * em[4]) +
                       x[4] * nm2 + x[5] * nm4 + x[6] * nm6) /
                      em[5];
    out.exp_coefficients[5] = a5;
    out.moment = c0 * em[0];
    for (int k = 1; k <= 5; ++k) out.moment += out.exp_coefficients[k] * em[k];
    out.moment -= x[4] * nm2 + x[5] * nm4 + x[6] * nm6;

    double sq = 0.0, worst = 0.0;
    for (const auto& [x_i, y_i] : samples) {
        const double e = std::exp(-2.0 * x_i);
        const double es = e1(2.0 * x_i);
        double model = 0.0, xp = 1.0;
        for (int k = 0; k <= 5; ++k, xp *= x_i) model += out.exp_coefficients[k] * xp * e;
        xp = 1.0;
        for (int j = 0; j <= 6; ++j, xp *= x_i) model -= out.ei_coefficients[j] * xp * es;
        const double r = y_i - model;
        sq += r * r;
        worst = std::max(worst, std::abs(r));
    }
    out.rms_residual = std::sqrt(sq / static_cast<double>(rows));
    out.max_residual = worst;
    return out;
}

}  // namespace cpdex::oracle
