#include <doctest.h>

#include <cmath>
#include <random>

#include "alefv/physics.hpp"

using namespace alefv;

namespace {
State euler(double a, double b, double c, double d) {
    State q(4);
    q << a, b, c, d;
    return q;
}
}  // namespace

TEST_CASE("Euler flux of fluid at rest is pure pressure") {
    Physics phys(SystemKind::Euler, 1.4);
    double p = 0.7;
    State q = euler(1.0, 0.0, 0.0, p / 0.4);
    State f, g;
    phys.flux(q, f, g);
    CHECK(f(0) == doctest::Approx(0.0));
    CHECK(f(1) == doctest::Approx(p).epsilon(1e-14));
    CHECK(f(2) == doctest::Approx(0.0));
    CHECK(f(3) == doctest::Approx(0.0));
    CHECK(g(0) == doctest::Approx(0.0));
    CHECK(g(1) == doctest::Approx(0.0));
    CHECK(g(2) == doctest::Approx(p).epsilon(1e-14));
    CHECK(g(3) == doctest::Approx(0.0));
}

TEST_CASE("Euler flux sample value") {
    Physics phys(SystemKind::Euler, 1.4);
    State q = euler(1.0, 1.0, 0.0, 1.0);
    CHECK(phys.pressure(q) == doctest::Approx(0.2).epsilon(1e-14));
    State f, g;
    phys.flux(q, f, g);
    CHECK(f(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f(1) == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(f(2) == doctest::Approx(0.0));
    CHECK(f(3) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("pressure examples") {
    Physics e14(SystemKind::Euler, 1.4);
    CHECK(e14.pressure(euler(1.0, 0.0, 0.0, 2.5)) == doctest::Approx(1.0).epsilon(1e-14));

    Physics m53(SystemKind::Mhd, 5.0 / 3.0, 1.0);
    State q(7);
    q << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0;
    CHECK(m53.pressure(q) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    Physics e53(SystemKind::Euler, 5.0 / 3.0);
    CHECK(e53.pressure(euler(1.0, 0.0, 0.0, 1e-4)) ==
          doctest::Approx(2.0 / 3.0 * 1e-4).epsilon(1e-13));
}

TEST_CASE("MHD flux with zero field reduces to Euler plus cleaning row") {
    double ch = 2.0;
    Physics mhd(SystemKind::Mhd, 1.4, ch);
    Physics eul(SystemKind::Euler, 1.4);
    State q(7);
    q << 1.0, 0.0, 0.0, 2.5, 0.0, 0.0, 0.0;
    State f, g, fe, ge;
    mhd.flux(q, f, g);
    eul.flux(euler(1.0, 0.0, 0.0, 2.5), fe, ge);
    for (int i = 0; i < 4; ++i) {
        CHECK(f(i) == doctest::Approx(fe(i)).epsilon(1e-14));
        CHECK(g(i) == doctest::Approx(ge(i)).epsilon(1e-14));
    }
    CHECK(f(6) == doctest::Approx(ch * ch * q(4)));
    CHECK(f(6) == doctest::Approx(0.0));
}

TEST_CASE("max eigenvalue") {
    Physics eul(SystemKind::Euler, 1.4);
    State rest = euler(1.0, 0.0, 0.0, 2.5);
    CHECK(eul.maxAbsEigenvalue(rest) == doctest::Approx(std::sqrt(1.4)).epsilon(1e-13));

    State moving = euler(1.0, 1.0, 1.0, 4.0);
    double c = eul.soundSpeed(moving);
    CHECK(eul.maxAbsEigenvalue(moving) == doctest::Approx(std::sqrt(2.0) + c).epsilon(1e-13));

    Physics mhd(SystemKind::Mhd, 1.4, 0.5);
    State qm(7);
    qm << 1.0, 0.0, 0.0, 2.5, 0.0, 0.0, 0.0;
    CHECK(mhd.maxAbsEigenvalue(qm) ==
          doctest::Approx(std::max(std::sqrt(1.4), 0.5)).epsilon(1e-13));
}

TEST_CASE("Davis estimates bracket the rest fan symmetrically") {
    Physics eul(SystemKind::Euler, 1.4);
    State rest = euler(1.0, 0.0, 0.0, 2.5);
    auto [sl, sr] = eul.eigenEstimatesNormal(rest, rest, Vec2(1, 0), 0.0);
    double c = eul.soundSpeed(rest);
    CHECK(sl == doctest::Approx(-c).epsilon(1e-13));
    CHECK(sr == doctest::Approx(c).epsilon(1e-13));

    // Lagrangian frame: normal mesh speed equal to fluid normal speed.
    State mv = euler(1.0, 0.7, -0.3, 3.0);
    Vec2 n(0.6, 0.8);
    double vn = (0.7 * 0.6 - 0.3 * 0.8);
    auto [l2, r2] = eul.eigenEstimatesNormal(mv, mv, n, vn);
    CHECK(l2 == doctest::Approx(-r2).epsilon(1e-12));
}

TEST_CASE("rotational invariance of the Euler flux") {
    Physics phys(SystemKind::Euler, 1.4);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.5, 2.0);
    for (int it = 0; it < 100; ++it) {
        double rho = pos(rng), uu = u(rng), vv = u(rng), p = pos(rng);
        State prim = euler(rho, uu, vv, p);
        State q = phys.fromPrimitive(prim);
        double ang = 2.0 * M_PI * (it + 0.37) / 100.0;
        Mat2 r;
        r << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
        Vec2 n(std::cos(0.3), std::sin(0.3));
        // Rotate state, evaluate along rotated normal, compare momentum back-rotated.
        State prim_rot = prim;
        Vec2 vrot = r * Vec2(uu, vv);
        prim_rot(1) = vrot.x();
        prim_rot(2) = vrot.y();
        State qrot = phys.fromPrimitive(prim_rot);
        State fr = phys.fluxNormal(qrot, r * n);
        State f = phys.fluxNormal(q, n);
        Vec2 mom = r.transpose() * Vec2(fr(1), fr(2));
        CHECK(fr(0) == doctest::Approx(f(0)).epsilon(1e-12));
        CHECK(mom.x() == doctest::Approx(f(1)).epsilon(1e-12));
        CHECK(mom.y() == doctest::Approx(f(2)).epsilon(1e-12));
        CHECK(fr(3) == doctest::Approx(f(3)).epsilon(1e-12));
    }
}

TEST_CASE("Lagrangian frame flux has zero mass component") {
    for (auto kind : {SystemKind::Euler, SystemKind::Mhd}) {
        Physics phys(kind, 1.4, kind == SystemKind::Mhd ? 1.5 : 0.0);
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> pos(0.5, 2.0);
        for (int it = 0; it < 50; ++it) {
            State prim(phys.numVars());
            prim(0) = pos(rng);
            prim(1) = u(rng);
            prim(2) = u(rng);
            prim(3) = pos(rng);
            if (kind == SystemKind::Mhd) {
                prim(4) = u(rng);
                prim(5) = u(rng);
                prim(6) = u(rng);
            }
            State q = phys.fromPrimitive(prim);
            Vec2 n(std::cos(it * 0.2), std::sin(it * 0.2));
            double vn = phys.velocity(q).dot(n);
            State fa = phys.fluxAle(q, n, vn);
            CHECK(std::abs(fa(0)) <= 1e-12);
        }
    }
}

TEST_CASE("primitive round trip") {
    for (auto kind : {SystemKind::Euler, SystemKind::Mhd}) {
        Physics phys(kind, 5.0 / 3.0, kind == SystemKind::Mhd ? 2.0 : 0.0);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::uniform_real_distribution<double> pos(0.1, 3.0);
        for (int it = 0; it < 100; ++it) {
            State prim(phys.numVars());
            prim(0) = pos(rng);
            prim(1) = u(rng);
            prim(2) = u(rng);
            prim(3) = pos(rng);
            if (kind == SystemKind::Mhd) {
                prim(4) = u(rng);
                prim(5) = u(rng);
                prim(6) = u(rng);
            }
            State back = phys.toPrimitive(phys.fromPrimitive(prim));
            CHECK((back - prim).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("admissibility errors") {
    Physics phys(SystemKind::Euler, 1.4);
    CHECK_THROWS_AS(phys.pressure(euler(1.0, 2.0, 0.0, 1.0)), SolverError);
    CHECK_FALSE(phys.admissible(euler(-1.0, 0.0, 0.0, 1.0)));
    CHECK(phys.admissible(euler(1.0, 0.0, 0.0, 1.0)));
    CHECK_THROWS_AS(Physics(SystemKind::Euler, 1.0), SolverError);
    CHECK_THROWS_AS(Physics(SystemKind::Mhd, 1.4, 0.0), SolverError);
}
