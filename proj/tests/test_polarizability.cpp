#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cpdex/polarizability.hpp"

using namespace cpdex;

TEST_CASE("fixed model is frequency independent") {
    Polarizability p;
    p.alpha0 = Mat3::diagonal(1.0, 2.0, 3.0);
    for (double xi : {0.0, 0.5, 10.0}) {
        auto a = p.at(xi);
        CHECK(a(0, 0) == 1.0);
        CHECK(a(1, 1) == 2.0);
        CHECK(a(2, 2) == 3.0);
    }
}

TEST_CASE("two-state model rolls off as a single Lorentzian") {
    Polarizability p;
    p.model = Polarizability::Model::two_state;
    p.alpha0 = Mat3::diagonal(2.0, 2.0, 2.0);
    p.resonance_length = 0.5;
    CHECK(p.at(0.0)(0, 0) == Catch::Approx(2.0));
    CHECK(p.at(2.0)(0, 0) == Catch::Approx(2.0 / (1.0 + 1.0)));
    CHECK(p.at(10.0)(2, 2) == Catch::Approx(2.0 / 26.0));
}

TEST_CASE("validation rejects asymmetric tensors and bad resonance lengths") {
    Polarizability p;
    p.alpha0 = Mat3::identity();
    CHECK_NOTHROW(validate(p));
    p.alpha0(0, 1) = 1e-6;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.alpha0(1, 0) = 1e-6;
    CHECK_NOTHROW(validate(p));
    p.model = Polarizability::Model::two_state;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.resonance_length = 0.3;
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("in-plane rotation by pi/4 mixes the planar block as expected") {
    const Mat3 t = Mat3::diagonal(1.0, 3.0, 5.0);
    const Mat3 r = rotate_inplane(t, std::numbers::pi / 4);
    CHECK(r(0, 0) == Catch::Approx(2.0));
    CHECK(r(1, 1) == Catch::Approx(2.0));
    CHECK(r(0, 1) == Catch::Approx(1.0));  // (3 - 1) / 2
    CHECK(r(1, 0) == Catch::Approx(1.0));
    CHECK(r(2, 2) == Catch::Approx(5.0));
}

TEST_CASE("in-plane rotation transforms tensor components covariantly") {
    Mat3 t;
    t(0, 0) = 1.2; t(0, 1) = 0.3; t(0, 2) = -0.4;
    t(1, 0) = 0.3; t(1, 1) = 0.7; t(1, 2) = 0.1;
    t(2, 0) = -0.4; t(2, 1) = 0.1; t(2, 2) = 2.0;
    const double th = 0.37;
    const Mat3 r = rotate_inplane(t, th);
    const double c = std::cos(th), s = std::sin(th);
    // the (xx - yy, 2 xy) pair turns by twice the angle
    const double d0 = t(0, 0) - t(1, 1), o0 = 2 * t(0, 1);
    CHECK(r(0, 0) - r(1, 1) ==
          Catch::Approx(std::cos(2 * th) * d0 + std::sin(2 * th) * o0));
    CHECK(2 * r(0, 1) == Catch::Approx(-std::sin(2 * th) * d0 + std::cos(2 * th) * o0));
    // the (zx, zy) pair turns by the angle itself
    CHECK(r(2, 0) == Catch::Approx(c * t(2, 0) + s * t(2, 1)));
    CHECK(r(2, 1) == Catch::Approx(-s * t(2, 0) + c * t(2, 1)));
    // trace and zz are invariant
    CHECK(r(0, 0) + r(1, 1) + r(2, 2) == Catch::Approx(t(0, 0) + t(1, 1) + t(2, 2)));
    CHECK(r(2, 2) == Catch::Approx(t(2, 2)));
}

TEST_CASE("rotation helpers") {
    const Mat3 r = rotation_taking({0, 0, 1}, {1, 0, 0});
    const Vec3 v = apply(r, {0, 0, 1});
    CHECK(v.x == Catch::Approx(1.0));
    CHECK(v.y == Catch::Approx(0.0).margin(1e-15));
    CHECK(v.z == Catch::Approx(0.0).margin(1e-15));
    // antiparallel case is deterministic and a proper rotation
    const Mat3 flip = rotation_taking({0, 0, 1}, {0, 0, -1});
    const Vec3 w = apply(flip, {0, 0, 1});
    CHECK(w.z == Catch::Approx(-1.0));
    const Mat3 should_be_id = flip * transpose(flip);
    for (int i = 0; i < 3; ++i) CHECK(should_be_id(i, i) == Catch::Approx(1.0));
    CHECK(is_isotropic(Mat3::diagonal(2, 2, 2)));
    CHECK_FALSE(is_isotropic(Mat3::diagonal(2, 2, 2.1)));
}

TEST_CASE("brace decomposition extracts the five contractions") {
    Mat3 t{};
    t(0, 0) = 2.0; t(1, 1) = 0.5; t(2, 2) = 3.0;
    t(0, 1) = t(1, 0) = 0.25;
    t(0, 2) = t(2, 0) = -0.75;
    t(1, 2) = t(2, 1) = 0.125;
    auto c = decompose(t);
    CHECK(c.perp == 2.5);
    CHECK(c.zz == 3.0);
    CHECK(c.diff == 1.5);
    CHECK(c.twice_xy == 0.5);
    CHECK(c.zx == -0.75);
    CHECK(c.zy == 0.125);

    Mat3 bad{};
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(decompose(bad), std::invalid_argument);
}

TEST_CASE("decomposition pairs transform covariantly under in-plane rotation") {
    Mat3 t{};
    t(0, 0) = 1.2; t(1, 1) = -0.4; t(2, 2) = 0.9;
    t(0, 1) = t(1, 0) = 0.3;
    t(0, 2) = t(2, 0) = 0.6;
    t(1, 2) = t(2, 1) = -0.2;
    const double th = 0.37;
    auto a = decompose(t);
    auto b = decompose(rotate_inplane(t, th));
    const double c2 = std::cos(2 * th), s2 = std::sin(2 * th);
    CHECK(b.diff == Catch::Approx(c2 * a.diff + s2 * a.twice_xy).epsilon(1e-14));
    CHECK(b.twice_xy == Catch::Approx(-s2 * a.diff + c2 * a.twice_xy).epsilon(1e-14));
    const double c1 = std::cos(th), s1 = std::sin(th);
    CHECK(b.zx == Catch::Approx(c1 * a.zx + s1 * a.zy).epsilon(1e-14));
    CHECK(b.zy == Catch::Approx(-s1 * a.zx + c1 * a.zy).epsilon(1e-14));
    CHECK(b.perp == Catch::Approx(a.perp).epsilon(1e-14));
    CHECK(b.zz == a.zz);
}
