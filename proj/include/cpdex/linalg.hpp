#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cpdex {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend Vec3 operator-(Vec3 v) { return {-v.x, -v.y, -v.z}; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(Vec3 v) {
    const double n = norm(v);
    if (n == 0.0) throw std::domain_error("normalized: zero vector");
    return (1.0 / n) * v;
}

struct Mat3 {
    // row-major
    std::array<double, 9> m{};

    double& operator()(int r, int c) { return m[3 * r + c]; }
    double operator()(int r, int c) const { return m[3 * r + c]; }

    static Mat3 identity() {
        Mat3 out;
        out(0, 0) = out(1, 1) = out(2, 2) = 1.0;
        return out;
    }
    static Mat3 diagonal(double a, double b, double c) {
        Mat3 out;
        out(0, 0) = a;
        out(1, 1) = b;
        out(2, 2) = c;
        return out;
    }

    friend Mat3 operator+(const Mat3& a, const Mat3& b) {
        Mat3 out;
        for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] + b.m[i];
        return out;
    }
    friend Mat3 operator*(double s, const Mat3& a) {
        Mat3 out;
        for (int i = 0; i < 9; ++i) out.m[i] = s * a.m[i];
        return out;
    }
    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < 3; ++k) out(r, c) += a(r, k) * b(k, c);
        return out;
    }
};

inline Mat3 transpose(const Mat3& a) {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out(r, c) = a(c, r);
    return out;
}

inline Vec3 apply(const Mat3& a, Vec3 v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
            a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
            a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

// Rodrigues rotation taking the right-handed turn by angle about a unit axis.
inline Mat3 rotation_about_axis(Vec3 axis, double angle) {
    const Vec3 u = normalized(axis);
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    Mat3 r;
    r(0, 0) = c + u.x * u.x * t;
    r(0, 1) = u.x * u.y * t - u.z * s;
    r(0, 2) = u.x * u.z * t + u.y * s;
    r(1, 0) = u.y * u.x * t + u.z * s;
    r(1, 1) = c + u.y * u.y * t;
    r(1, 2) = u.y * u.z * t - u.x * s;
    r(2, 0) = u.z * u.x * t - u.y * s;
    r(2, 1) = u.z * u.y * t + u.x * s;
    r(2, 2) = c + u.z * u.z * t;
    return r;
}

// Rotation with smallest angle taking unit vector a to unit vector b; the
// antiparallel case picks the x axis as the turning axis deterministically.
inline Mat3 rotation_taking(Vec3 a, Vec3 b) {
    const Vec3 ua = normalized(a), ub = normalized(b);
    const Vec3 axis = cross(ua, ub);
    const double s = norm(axis), c = dot(ua, ub);
    if (s < 1e-14) {
        if (c > 0.0) return Mat3::identity();
        Vec3 perp = std::abs(ua.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        perp = normalized(perp - dot(perp, ua) * ua);
        return rotation_about_axis(perp, std::numbers::pi_v<double>);
    }
    return rotation_about_axis(axis, std::atan2(s, c));
}

// congruence transform R t R^T, the image of a rank-2 tensor under rotation R
inline Mat3 rotate_tensor(const Mat3& r, const Mat3& t) { return r * t * transpose(r); }

}  // namespace cpdex
