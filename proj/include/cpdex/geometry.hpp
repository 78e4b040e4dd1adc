#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cpdex/linalg.hpp"
#include "cpdex/specfun.hpp"

namespace cpdex {

// Bivariate Taylor polynomial truncated at total degree 4. Coefficients are
// stored for the monomials u^i v^j with i + j <= 4, so a jet read off a
// Taylor2D must multiply back the factorials.
class Taylor2D {
  public:
    static constexpr int size = 15;

    static constexpr int index(int i, int j) {
        constexpr int offset[5] = {0, 1, 3, 6, 10};
        return offset[i + j] + j;
    }

    double coeff(int i, int j) const { return c_[index(i, j)]; }
    double& coeff(int i, int j) { return c_[index(i, j)]; }
    double value() const { return c_[0]; }

    static Taylor2D constant(double v) {
        Taylor2D t;
        t.c_[0] = v;
        return t;
    }

    Taylor2D operator+(const Taylor2D& o) const {
        Taylor2D r;
        for (int k = 0; k < size; ++k) r.c_[k] = c_[k] + o.c_[k];
        return r;
    }
    Taylor2D operator-(const Taylor2D& o) const {
        Taylor2D r;
        for (int k = 0; k < size; ++k) r.c_[k] = c_[k] - o.c_[k];
        return r;
    }
    Taylor2D operator*(double s) const {
        Taylor2D r;
        for (int k = 0; k < size; ++k) r.c_[k] = c_[k] * s;
        return r;
    }
    Taylor2D operator*(const Taylor2D& o) const {
        Taylor2D r;
        for (int d1 = 0; d1 <= 4; ++d1)
            for (int i1 = d1; i1 >= 0; --i1) {
                const int j1 = d1 - i1;
                const double a = c_[index(i1, j1)];
                if (a == 0.0) continue;
                for (int d2 = 0; d2 + d1 <= 4; ++d2)
                    for (int i2 = d2; i2 >= 0; --i2) {
                        const int j2 = d2 - i2;
                        r.c_[index(i1 + i2, j1 + j2)] += a * o.c_[index(i2, j2)];
                    }
            }
        return r;
    }

    // f(inner) where f is described by its value and first four derivatives at
    // the inner series' constant term.
    static Taylor2D compose(const std::array<double, 5>& f, const Taylor2D& inner) {
        Taylor2D w = inner;
        w.c_[0] = 0.0;
        Taylor2D acc = constant(f[4] / 24.0);
        acc = acc * w + constant(f[3] / 6.0);
        acc = acc * w + constant(f[2] / 2.0);
        acc = acc * w + constant(f[1]);
        acc = acc * w + constant(f[0]);
        return acc;
    }

    // this(U, V) with U, V series in new variables. U and V may carry constant
    // terms only when this is exactly polynomial in them, which holds here
    // because every series is truncated consistently at degree 4.
    Taylor2D substitute(const Taylor2D& U, const Taylor2D& V) const {
        std::array<Taylor2D, 5> up, vp;
        up[0] = constant(1.0);
        vp[0] = constant(1.0);
        for (int k = 1; k <= 4; ++k) {
            up[k] = up[k - 1] * U;
            vp[k] = vp[k - 1] * V;
        }
        Taylor2D r;
        for (int d = 0; d <= 4; ++d)
            for (int i = d; i >= 0; --i) {
                const int j = d - i;
                const double a = c_[index(i, j)];
                if (a != 0.0) r = r + up[i] * vp[j] * a;
            }
        return r;
    }

  private:
    std::array<double, 15> c_{};

    Taylor2D operator+(double s) const = delete;
};

inline Taylor2D operator*(double s, const Taylor2D& t) { return t * s; }

// ---------------------------------------------------------------------------
// Surface families. Each describes the height of the surface below the
// particle as F(x, y) = standoff + shape(x, y); +z points from the particle
// toward the surface and the particle sits at the origin.

struct Sphere {
    double radius = 1.0;
};

struct Cylinder {
    double radius = 1.0;
    double axis_angle = 0.0;  // direction of the translation-invariant axis
};

struct Sinusoid {
    double amplitude = 0.1;
    double wavelength = 1.0;
    double phase = 0.0;
    double direction = 0.0;
};

struct GaussianBump {
    double height = 0.1;  // positive: bump pointing at the particle
    double width = 1.0;
};

// shape = sum c[m][n] x^m y^n with m + n <= 4.
struct Polynomial {
    std::array<std::array<double, 5>, 5> c{};
};

// Regular samples of the shape height, heights[j * nx + i] at
// (x0 + i*spacing, y0 + j*spacing). Derivatives come from centered
// differences, so the usable interior shrinks by the stencil reach.
struct Grid {
    double spacing = 0.1;
    int nx = 0;
    int ny = 0;
    std::vector<double> heights;
    double x0 = 0.0;
    double y0 = 0.0;
};

using SurfaceShape = std::variant<Sphere, Cylinder, Sinusoid, GaussianBump, Polynomial, Grid>;

struct SurfaceProfile {
    SurfaceShape shape;
    double standoff = 1.0;
};

inline void validate(const SurfaceProfile& prof) {
    if (!(prof.standoff > 0.0))
        throw std::invalid_argument("surface: standoff must be positive");
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, Cylinder>) {
                if (!(s.radius > 0.0))
                    throw std::invalid_argument("surface: radius must be positive");
            } else if constexpr (std::is_same_v<T, Sinusoid>) {
                if (!(s.amplitude > 0.0) || !(s.wavelength > 0.0))
                    throw std::invalid_argument(
                        "surface: sinusoid needs positive amplitude and wavelength");
            } else if constexpr (std::is_same_v<T, GaussianBump>) {
                if (!(s.width > 0.0))
                    throw std::invalid_argument("surface: bump width must be positive");
            } else if constexpr (std::is_same_v<T, Grid>) {
                if (!(s.spacing > 0.0) || s.nx < 5 || s.ny < 5 ||
                    s.heights.size() != static_cast<std::size_t>(s.nx) * s.ny)
                    throw std::invalid_argument(
                        "surface: grid needs positive spacing, at least 5x5 nodes, "
                        "and a matching height array");
            }
        },
        prof.shape);
}

namespace detail {

// Derivative cycles for the analytic families.
inline std::array<double, 5> sqrt_derivs(double s0) {
    if (!(s0 > 0.0))
        throw std::domain_error("surface: point is outside the sphere/cylinder chart");
    const double r = std::sqrt(s0);
    return {r, 0.5 / r, -0.25 / (r * s0), 0.375 / (r * s0 * s0),
            -0.9375 / (r * s0 * s0 * s0)};
}

inline std::array<double, 5> cos_derivs(double w0) {
    const double c = std::cos(w0), s = std::sin(w0);
    return {c, -s, -c, s, c};
}

inline std::array<double, 5> exp_derivs(double w0) {
    const double e = std::exp(w0);
    return {e, e, e, e, e};
}

// rho^2 = (x0+u)^2 + (y0+v)^2 as an exact quadratic series.
inline Taylor2D rho_squared(double x0, double y0) {
    Taylor2D t;
    t.coeff(0, 0) = x0 * x0 + y0 * y0;
    t.coeff(1, 0) = 2.0 * x0;
    t.coeff(0, 1) = 2.0 * y0;
    t.coeff(2, 0) = 1.0;
    t.coeff(0, 2) = 1.0;
    return t;
}

// (c x + s y) as a series around (x0, y0).
inline Taylor2D directed_coordinate(double x0, double y0, double c, double s) {
    Taylor2D t;
    t.coeff(0, 0) = c * x0 + s * y0;
    t.coeff(1, 0) = c;
    t.coeff(0, 1) = s;
    return t;
}

inline long binom(int n, int k) {
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

inline Taylor2D polynomial_taylor(const std::array<std::array<double, 5>, 5>& c,
                                  double x0, double y0) {
    Taylor2D t;
    for (int m = 0; m <= 4; ++m)
        for (int n = 0; n + m <= 4; ++n) {
            if (c[m][n] == 0.0) continue;
            for (int i = 0; i <= m; ++i)
                for (int j = 0; j <= n; ++j) {
                    if (i + j > 4) continue;
                    t.coeff(i, j) += c[m][n] * binom(m, i) * std::pow(x0, m - i) *
                                     binom(n, j) * std::pow(y0, n - j);
                }
        }
    return t;
}

// Centered-difference partials of a grid function around node (i0, j0) with a
// Richardson level when the 9x9 window fits; plain second-order stencils when
// only 5x5 fits.
struct GridStencils {
    // weights per derivative order at unit step offsets
    static const std::vector<std::pair<int, double>>& order(int n) {
        static const std::vector<std::pair<int, double>> w[5] = {
            {{0, 1.0}},
            {{-1, -0.5}, {1, 0.5}},
            {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
            {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
            {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}}};
        return w[n];
    }
};

inline double grid_partial_once(const Grid& g, int i0, int j0, int px, int py,
                                int step) {
    const double hx = std::pow(g.spacing * step, px);
    const double hy = std::pow(g.spacing * step, py);
    double acc = 0.0;
    for (const auto& [a, wa] : GridStencils::order(px))
        for (const auto& [b, wb] : GridStencils::order(py)) {
            const int i = i0 + a * step, j = j0 + b * step;
            acc += wa * wb * g.heights[static_cast<std::size_t>(j) * g.nx + i];
        }
    return acc / (hx * hy);
}

inline Taylor2D grid_node_taylor(const Grid& g, int i0, int j0) {
    const int reach_full = 4, reach_min = 2;
    const int margin = std::min({i0, j0, g.nx - 1 - i0, g.ny - 1 - j0});
    if (margin < reach_min)
        throw std::invalid_argument(
            "surface: grid is too coarse near the foot point (stencil out of bounds)");
    const bool richardson = margin >= reach_full;
    Taylor2D t;
    for (int px = 0; px <= 4; ++px)
        for (int py = 0; py + px <= 4; ++py) {
            double d = grid_partial_once(g, i0, j0, px, py, 1);
            if (richardson && px + py > 0)
                d = (4.0 * d - grid_partial_once(g, i0, j0, px, py, 2)) / 3.0;
            double fact = 1.0;
            for (int k = 2; k <= px; ++k) fact *= k;
            for (int k = 2; k <= py; ++k) fact *= k;
            t.coeff(px, py) = d / fact;
        }
    return t;
}

}  // namespace detail

// Degree-4 Taylor series of F(x, y) = standoff + shape around (x0, y0).
inline Taylor2D profile_taylor(const SurfaceProfile& prof, double x0, double y0) {
    using detail::cos_derivs;
    using detail::directed_coordinate;
    using detail::exp_derivs;
    using detail::rho_squared;
    using detail::sqrt_derivs;

    Taylor2D shape = std::visit(
        [&](const auto& s) -> Taylor2D {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                Taylor2D inner =
                    Taylor2D::constant(s.radius * s.radius) - rho_squared(x0, y0);
                return Taylor2D::constant(s.radius) -
                       Taylor2D::compose(sqrt_derivs(inner.value()), inner);
            } else if constexpr (std::is_same_v<T, Cylinder>) {
                Taylor2D t = directed_coordinate(x0, y0, -std::sin(s.axis_angle),
                                                 std::cos(s.axis_angle));
                Taylor2D inner = Taylor2D::constant(s.radius * s.radius) - t * t;
                return Taylor2D::constant(s.radius) -
                       Taylor2D::compose(sqrt_derivs(inner.value()), inner);
            } else if constexpr (std::is_same_v<T, Sinusoid>) {
                const double k = 2.0 * std::numbers::pi / s.wavelength;
                Taylor2D arg = directed_coordinate(x0, y0, std::cos(s.direction),
                                                   std::sin(s.direction)) *
                                   k +
                               Taylor2D::constant(s.phase);
                return (Taylor2D::constant(1.0) -
                        Taylor2D::compose(cos_derivs(arg.value()), arg)) *
                       s.amplitude;
            } else if constexpr (std::is_same_v<T, GaussianBump>) {
                Taylor2D g = rho_squared(x0, y0) * (-0.5 / (s.width * s.width));
                return (Taylor2D::constant(1.0) -
                        Taylor2D::compose(exp_derivs(g.value()), g)) *
                       s.height;
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return detail::polynomial_taylor(s.c, x0, y0);
            } else {
                const Grid& g = s;
                const int i0 = static_cast<int>(std::lround((x0 - g.x0) / g.spacing));
                const int j0 = static_cast<int>(std::lround((y0 - g.y0) / g.spacing));
                if (i0 < 0 || j0 < 0 || i0 >= g.nx || j0 >= g.ny)
                    throw std::invalid_argument("surface: point is outside the grid");
                Taylor2D node = detail::grid_node_taylor(g, i0, j0);
                // re-center the node polynomial at (x0, y0)
                std::array<std::array<double, 5>, 5> c{};
                for (int i = 0; i <= 4; ++i)
                    for (int j = 0; j + i <= 4; ++j) c[i][j] = node.coeff(i, j);
                return detail::polynomial_taylor(c, x0 - (g.x0 + i0 * g.spacing),
                                                 y0 - (g.y0 + j0 * g.spacing));
            }
        },
        prof.shape);
    shape.coeff(0, 0) += prof.standoff;
    return shape;
}

inline double profile_height(const SurfaceProfile& prof, double x, double y) {
    return profile_taylor(prof, x, y).value();
}

// ---------------------------------------------------------------------------
// Closest point of the surface to the particle at the origin.

struct FootPoint {
    double x = 0.0;
    double y = 0.0;
    double height = 0.0;    // F at the foot
    double distance = 0.0;  // |(x, y, F)|
    bool degenerate = false;  // another minimum at the same distance
    int candidates = 1;
};

namespace detail {

inline double scan_halfwidth(const SurfaceProfile& prof) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, Cylinder>)
                return 0.7 * s.radius;
            else if constexpr (std::is_same_v<T, Sinusoid>)
                return 1.05 * s.wavelength;
            else if constexpr (std::is_same_v<T, GaussianBump>)
                return std::max(4.0 * s.width, prof.standoff);
            else if constexpr (std::is_same_v<T, Polynomial>)
                return 3.0 * prof.standoff;
            else
                return 0.0;  // grid scans its own nodes
        },
        prof.shape);
}

struct Candidate {
    double x, y, dist2;
};

// Damped Newton on the squared particle-surface distance.
inline bool refine_candidate(const SurfaceProfile& prof, Candidate& c) {
    for (int it = 0; it < 60; ++it) {
        Taylor2D t = profile_taylor(prof, c.x, c.y);
        const double F = t.value(), Fx = t.coeff(1, 0), Fy = t.coeff(0, 1);
        const double Fxx = 2.0 * t.coeff(2, 0), Fyy = 2.0 * t.coeff(0, 2),
                     Fxy = t.coeff(1, 1);
        const double gx = 2.0 * c.x + 2.0 * F * Fx;
        const double gy = 2.0 * c.y + 2.0 * F * Fy;
        c.dist2 = c.x * c.x + c.y * c.y + F * F;
        const double scale = std::max(1.0, c.dist2);
        if (std::abs(gx) < 1e-13 * scale && std::abs(gy) < 1e-13 * scale) return true;
        const double hxx = 2.0 + 2.0 * Fx * Fx + 2.0 * F * Fxx;
        const double hyy = 2.0 + 2.0 * Fy * Fy + 2.0 * F * Fyy;
        const double hxy = 2.0 * Fx * Fy + 2.0 * F * Fxy;
        double det = hxx * hyy - hxy * hxy;
        double sx, sy;
        if (std::abs(det) > 1e-14 * scale) {
            sx = -(hyy * gx - hxy * gy) / det;
            sy = -(hxx * gy - hxy * gx) / det;
        } else {
            sx = -0.25 * gx;
            sy = -0.25 * gy;
        }
        // backtrack until the squared distance decreases
        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            const double nx = c.x + step * sx, ny = c.y + step * sy;
            double nF;
            try {
                nF = profile_height(prof, nx, ny);
            } catch (const std::exception&) {
                step *= 0.5;
                continue;
            }
            const double nd = nx * nx + ny * ny + nF * nF;
            if (nd < c.dist2 * (1.0 + 1e-15) ) {
                c.x = nx;
                c.y = ny;
                c.dist2 = nd;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) return true;  // stationary within floating-point resolution
    }
    return false;
}

}  // namespace detail

inline FootPoint closest_point(const SurfaceProfile& prof) {
    validate(prof);

    // seed candidates from a coarse scan
    std::vector<detail::Candidate> seeds;
    const int n = 81;
    if (const Grid* g = std::get_if<Grid>(&prof.shape)) {
        for (int j = 2; j < g->ny - 2; ++j)
            for (int i = 2; i < g->nx - 2; ++i) {
                const double x = g->x0 + i * g->spacing, y = g->y0 + j * g->spacing;
                const double F =
                    prof.standoff + g->heights[static_cast<std::size_t>(j) * g->nx + i];
                if (F <= 0.0)
                    throw std::invalid_argument(
                        "surface: the surface reaches or crosses the particle");
                seeds.push_back({x, y, x * x + y * y + F * F});
            }
    } else {
        const double L = detail::scan_halfwidth(prof);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x = -L + 2.0 * L * i / (n - 1);
                const double y = -L + 2.0 * L * j / (n - 1);
                double F;
                try {
                    F = profile_height(prof, x, y);
                } catch (const std::exception&) {
                    continue;  // outside the family's chart
                }
                if (F <= 0.0)
                    throw std::invalid_argument(
                        "surface: the surface reaches or crosses the particle");
                seeds.push_back({x, y, x * x + y * y + F * F});
            }
    }
    if (seeds.empty()) throw std::invalid_argument("surface: empty search domain");

    std::sort(seeds.begin(), seeds.end(),
              [](const auto& a, const auto& b) { return a.dist2 < b.dist2; });
    seeds.resize(std::min<std::size_t>(seeds.size(), 24));

    std::vector<detail::Candidate> minima;
    for (auto c : seeds) {
        if (!detail::refine_candidate(prof, c))
            throw ConvergenceError("closest_point: Newton refinement stalled",
                                   std::sqrt(c.dist2));
        bool dup = false;
        for (const auto& m : minima) {
            const double dx = m.x - c.x, dy = m.y - c.y;
            if (dx * dx + dy * dy < 1e-12 * std::max(1.0, m.dist2)) dup = true;
        }
        if (!dup) minima.push_back(c);
    }
    std::sort(minima.begin(), minima.end(), [](const auto& a, const auto& b) {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });

    const auto& best = minima.front();
    FootPoint fp;
    fp.x = best.x;
    fp.y = best.y;
    fp.height = profile_height(prof, best.x, best.y);
    fp.distance = std::sqrt(best.dist2);
    if (!(fp.height > 0.0))
        throw std::invalid_argument("surface: the surface reaches or crosses the particle");
    int ties = 1;
    for (std::size_t k = 1; k < minima.size(); ++k)
        if (minima[k].dist2 <= best.dist2 * (1.0 + 1e-9)) ++ties;
    fp.candidates = static_cast<int>(minima.size());
    fp.degenerate = ties > 1;
    return fp;
}

// ---------------------------------------------------------------------------
// Height-function jet at a perpendicular foot point, expressed in the frame
// whose z axis runs from the particle through the foot point.

struct SurfaceJet {
    double d = 1.0;
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;
    double hxxx = 0.0, hxxy = 0.0, hxyy = 0.0, hyyy = 0.0;
    double hxxxx = 0.0, hxxxy = 0.0, hxxyy = 0.0, hxyyy = 0.0, hyyyy = 0.0;

    double laplacian() const { return hxx + hyy; }

    // Same jet in units of the separation: lengths divided by d, so the n-th
    // derivatives pick up a factor d^(n-1).
    SurfaceJet reduced() const {
        SurfaceJet r = *this;
        r.d = 1.0;
        r.hxx *= d; r.hxy *= d; r.hyy *= d;
        const double d2 = d * d;
        r.hxxx *= d2; r.hxxy *= d2; r.hxyy *= d2; r.hyyy *= d2;
        const double d3 = d2 * d;
        r.hxxxx *= d3; r.hxxxy *= d3; r.hxxyy *= d3; r.hxyyy *= d3; r.hyyyy *= d3;
        return r;
    }
};

inline SurfaceJet jet_at(const SurfaceProfile& prof, double x0, double y0) {
    validate(prof);
    const Taylor2D T = profile_taylor(prof, x0, y0);
    const double F0 = T.value();
    if (!(F0 > 0.0))
        throw std::invalid_argument("surface: the surface reaches or crosses the particle");

    const Vec3 w{x0, y0, F0};
    const double dist = norm(w);
    const Vec3 zp = (1.0 / dist) * w;

    const double Fx = T.coeff(1, 0), Fy = T.coeff(0, 1);
    const Vec3 tu{1.0, 0.0, Fx}, tv{0.0, 1.0, Fy};
    const double perp_tol = 1e-7 * dist * std::max(1.0, norm(tu) + norm(tv));
    if (std::abs(dot(tu, w)) > perp_tol || std::abs(dot(tv, w)) > perp_tol)
        throw std::domain_error("jet_at: point is not a perpendicular foot of the particle");

    // in-plane axes of the tilted frame
    Vec3 e1 = Vec3{1.0, 0.0, 0.0} - zp.x * zp;
    if (norm(e1) < 1e-8) e1 = Vec3{0.0, 1.0, 0.0} - zp.y * zp;
    e1 = normalized(e1);
    const Vec3 e2 = cross(zp, e1);

    // displacement series in the original graph variables (u, v)
    Taylor2D g = T;
    g.coeff(0, 0) = 0.0;
    Taylor2D U_lin, V_lin;
    U_lin.coeff(1, 0) = 1.0;
    V_lin.coeff(0, 1) = 1.0;
    const Taylor2D X = U_lin * e1.x + V_lin * e1.y + g * e1.z;
    const Taylor2D Y = U_lin * e2.x + V_lin * e2.y + g * e2.z;
    const Taylor2D Z = U_lin * zp.x + V_lin * zp.y + g * zp.z;

    // invert (X, Y)(u, v) as series in the tilted in-plane coordinates
    const double m00 = X.coeff(1, 0), m01 = X.coeff(0, 1);
    const double m10 = Y.coeff(1, 0), m11 = Y.coeff(0, 1);
    const double det = m00 * m11 - m01 * m10;
    if (std::abs(det) < 1e-10)
        throw std::domain_error("jet_at: surface is too steep for a height function");
    const double i00 = m11 / det, i01 = -m01 / det, i10 = -m10 / det, i11 = m00 / det;

    Taylor2D NX = X, NY = Y;  // nonlinear parts
    NX.coeff(1, 0) = NX.coeff(0, 1) = 0.0;
    NY.coeff(1, 0) = NY.coeff(0, 1) = 0.0;

    Taylor2D Xv, Yv;  // the new variables as series in themselves
    Xv.coeff(1, 0) = 1.0;
    Yv.coeff(0, 1) = 1.0;

    Taylor2D u = Xv * i00 + Yv * i01;
    Taylor2D v = Xv * i10 + Yv * i11;
    for (int it = 0; it < 4; ++it) {
        const Taylor2D rx = Xv - NX.substitute(u, v);
        const Taylor2D ry = Yv - NY.substitute(u, v);
        u = rx * i00 + ry * i01;
        v = rx * i10 + ry * i11;
    }

    Taylor2D H = Z.substitute(u, v);

    const double grad_tol = 1e-8 * std::max(1.0, dist);
    if (std::abs(H.coeff(1, 0)) > grad_tol || std::abs(H.coeff(0, 1)) > grad_tol)
        throw std::domain_error("jet_at: height gradient did not vanish at the foot point");

    SurfaceJet j;
    j.d = dist;
    j.hxx = 2.0 * H.coeff(2, 0);
    j.hxy = H.coeff(1, 1);
    j.hyy = 2.0 * H.coeff(0, 2);
    j.hxxx = 6.0 * H.coeff(3, 0);
    j.hxxy = 2.0 * H.coeff(2, 1);
    j.hxyy = 2.0 * H.coeff(1, 2);
    j.hyyy = 6.0 * H.coeff(0, 3);
    j.hxxxx = 24.0 * H.coeff(4, 0);
    j.hxxxy = 6.0 * H.coeff(3, 1);
    j.hxxyy = 4.0 * H.coeff(2, 2);
    j.hxyyy = 6.0 * H.coeff(1, 3);
    j.hyyyy = 24.0 * H.coeff(0, 4);
    return j;
}

inline SurfaceJet surface_jet(const SurfaceProfile& prof) {
    const FootPoint fp = closest_point(prof);
    return jet_at(prof, fp.x, fp.y);
}

// ---------------------------------------------------------------------------
// Principal curvature frame of the jet's Hessian.

struct PrincipalFrame {
    double kappa1 = 0.0;  // larger curvature, bends toward the particle first
    double kappa2 = 0.0;
    double angle = 0.0;  // direction of the kappa1 axis, in (-pi/2, pi/2]
};

inline PrincipalFrame principal_frame(const SurfaceJet& j) {
    const double mean = 0.5 * (j.hxx + j.hyy);
    const double dh = 0.5 * (j.hxx - j.hyy);
    const double r = std::hypot(dh, j.hxy);
    PrincipalFrame f;
    f.kappa1 = mean + r;
    f.kappa2 = mean - r;
    f.angle = (r == 0.0) ? 0.0 : 0.5 * std::atan2(2.0 * j.hxy, j.hxx - j.hyy);
    if (f.angle <= -0.5 * std::numbers::pi) f.angle += std::numbers::pi;
    return f;
}

// Jet components in a frame rotated by angle about the z axis (the new x axis
// points along (cos a, sin a) of the old frame).
inline SurfaceJet rotate_jet(const SurfaceJet& j, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    // rows: old components of the new basis vectors
    const double R[2][2] = {{c, s}, {-s, c}};  // new_a = R[a][i] old_i

    double h2[2][2] = {{j.hxx, j.hxy}, {j.hxy, j.hyy}};
    double h3[2][2][2];
    h3[0][0][0] = j.hxxx;
    h3[0][0][1] = h3[0][1][0] = h3[1][0][0] = j.hxxy;
    h3[0][1][1] = h3[1][0][1] = h3[1][1][0] = j.hxyy;
    h3[1][1][1] = j.hyyy;
    double h4[2][2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int cc = 0; cc < 2; ++cc)
                for (int d = 0; d < 2; ++d) {
                    const int ones = a + b + cc + d;
                    const double vals[5] = {j.hxxxx, j.hxxxy, j.hxxyy, j.hxyyy, j.hyyyy};
                    h4[a][b][cc][d] = vals[ones];
                }

    auto rot2 = [&](int a, int b) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) acc += R[a][i] * R[b][k] * h2[i][k];
        return acc;
    };
    auto rot3 = [&](int a, int b, int e) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) acc += R[a][i] * R[b][k] * R[e][l] * h3[i][k][l];
        return acc;
    };
    auto rot4 = [&](int a, int b, int e, int f) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    for (int m = 0; m < 2; ++m)
                        acc += R[a][i] * R[b][k] * R[e][l] * R[f][m] * h4[i][k][l][m];
        return acc;
    };

    SurfaceJet out;
    out.d = j.d;
    out.hxx = rot2(0, 0);
    out.hxy = rot2(0, 1);
    out.hyy = rot2(1, 1);
    out.hxxx = rot3(0, 0, 0);
    out.hxxy = rot3(0, 0, 1);
    out.hxyy = rot3(0, 1, 1);
    out.hyyy = rot3(1, 1, 1);
    out.hxxxx = rot4(0, 0, 0, 0);
    out.hxxxy = rot4(0, 0, 0, 1);
    out.hxxyy = rot4(0, 0, 1, 1);
    out.hxyyy = rot4(0, 1, 1, 1);
    out.hyyyy = rot4(1, 1, 1, 1);
    return out;
}

}  // namespace cpdex
