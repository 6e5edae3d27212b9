#include <doctest.h>

#include <cmath>
#include <random>

#include "alefv/riemann.hpp"
#include "oracles.hpp"

using namespace alefv;

namespace {

State euler(double rho, double u, double v, double p, double gamma = 1.4) {
    State q(4);
    q << rho, u, v, p;
    return Physics(SystemKind::Euler, gamma).fromPrimitive(q);
}

State mhd(double rho, double u, double v, double p, double bx, double by,
          double psi, double gamma = 1.4, double ch = 1.0) {
    State q(7);
    q << rho, u, v, p, bx, by, psi;
    return Physics(SystemKind::Mhd, gamma, ch).fromPrimitive(q);
}

State consistencyFlux(const Physics& phys, const State& q, const Vec3& nt) {
    return phys.fluxNormal(q, Vec2(nt.x(), nt.y())) + nt.z() * q;
}

// A four-edge fan replicating a planar 1D Riemann problem: interface through
// the vertex with unit normal n, left state on the -n side.
void planarFan(const Vec2& n, const State& ql, const State& qr,
               std::vector<Vec2>& eta, std::vector<State>& q) {
    Vec2 t(-n.y(), n.x());
    eta = {n, t, -n, -t};
    // q[j] sits between eta[j] and eta[j+1].
    q = {qr, ql, ql, qr};
}

}  // namespace

TEST_CASE("1D flux consistency: equal traces give the analytic flux") {
    Physics eu(SystemKind::Euler, 1.4);
    Physics mh(SystemKind::Mhd, 5.0 / 3.0, 1.5);
    State qe = euler(1.2, 0.4, -0.7, 2.1);
    State qm = mhd(1.1, 0.3, 0.2, 1.5, 0.8, -0.4, 0.1, 5.0 / 3.0, 1.5);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        Vec3 nt(dist(rng), dist(rng), dist(rng));
        if (Vec2(nt.x(), nt.y()).norm() < 0.2) continue;
        nt.normalize();
        CHECK((hll1dAle(eu, qe, qe, nt) - consistencyFlux(eu, qe, nt))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
        CHECK((hllc1dAle(eu, qe, qe, nt) - consistencyFlux(eu, qe, nt))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
        CHECK((hll1dAle(mh, qm, qm, nt) - consistencyFlux(mh, qm, nt))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
        CHECK((hllc1dAle(mh, qm, qm, nt) - consistencyFlux(mh, qm, nt))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
}

TEST_CASE("1D flux conservation across an edge") {
    Physics eu(SystemKind::Euler, 1.4);
    Physics mh(SystemKind::Mhd, 5.0 / 3.0, 1.2);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        State a = euler(0.5 + dist(rng), 2.0 * dist(rng) - 1.0,
                        2.0 * dist(rng) - 1.0, 0.5 + dist(rng));
        State b = euler(0.5 + dist(rng), 2.0 * dist(rng) - 1.0,
                        2.0 * dist(rng) - 1.0, 0.5 + dist(rng));
        Vec3 nt(2.0 * dist(rng) - 1.0, 2.0 * dist(rng) - 1.0, dist(rng) - 0.5);
        if (Vec2(nt.x(), nt.y()).norm() < 0.2) continue;
        nt.normalize();
        CHECK((hll1dAle(eu, a, b, nt) + hll1dAle(eu, b, a, -nt))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
        CHECK((hllc1dAle(eu, a, b, nt) + hllc1dAle(eu, b, a, -nt))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
        State am = mhd(0.5 + dist(rng), dist(rng), dist(rng), 0.5 + dist(rng),
                       dist(rng), dist(rng), 0.2 * dist(rng), 5.0 / 3.0, 1.2);
        State bm = mhd(0.5 + dist(rng), dist(rng), dist(rng), 0.5 + dist(rng),
                       dist(rng), dist(rng), 0.2 * dist(rng), 5.0 / 3.0, 1.2);
        CHECK((hll1dAle(mh, am, bm, nt) + hll1dAle(mh, bm, am, -nt))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
}

TEST_CASE("Lagrangian contact preservation") {
    Physics eu(SystemKind::Euler, 1.4);
    // Equal pressure and velocity, jump in density; face moves with the flow.
    Vec2 v(0.8, -0.3);
    State ql = euler(1.0, v.x(), v.y(), 2.5);
    State qr = euler(0.125, v.x(), v.y(), 2.5);
    Vec2 n(std::cos(0.3), std::sin(0.3));
    Vec3 nt(n.x(), n.y(), -v.dot(n));
    nt.normalize();

    State gc = hllc1dAle(eu, ql, qr, nt);
    // Exact contact flux through a co-moving face: (0, p n, p v.n) scaled.
    double scale = Vec2(nt.x(), nt.y()).norm();
    CHECK(std::abs(gc(0)) <= 1e-12);
    CHECK(gc(1) == doctest::Approx(scale * 2.5 * n.x()).epsilon(1e-12));
    CHECK(gc(2) == doctest::Approx(scale * 2.5 * n.y()).epsilon(1e-12));
    CHECK(gc(3) == doctest::Approx(scale * 2.5 * v.dot(n)).epsilon(1e-12));

    // The three-wave solver diffuses the contact: mass flux is nonzero.
    State gh = hll1dAle(eu, ql, qr, nt);
    CHECK(std::abs(gh(0)) > 1e-6);
}

TEST_CASE("Sod states against an independent scalar HLL oracle") {
    Physics eu(SystemKind::Euler, 1.4);
    State ql = euler(1.0, 0.0, 0.0, 1.0);
    State qr = euler(0.125, 0.0, 0.0, 0.1);
    Vec3 nt(1.0, 0.0, 0.0);
    State g = hll1dAle(eu, ql, qr, nt);

    // Scalar re-implementation: Davis speeds and the standard HLL formula.
    double g_ = 1.4;
    double cl = std::sqrt(g_ * 1.0 / 1.0), cr = std::sqrt(g_ * 0.1 / 0.125);
    double sL = std::min(0.0 - cl, 0.0 - cr);
    double sR = std::max(0.0 + cl, 0.0 + cr);
    auto fluxX = [&](double rho, double u, double p) {
        double E = p / (g_ - 1.0) + 0.5 * rho * u * u;
        return std::array<double, 4>{rho * u, rho * u * u + p, 0.0, u * (E + p)};
    };
    auto cons = [&](double rho, double u, double p) {
        return std::array<double, 4>{rho, rho * u, 0.0,
                                     p / (g_ - 1.0) + 0.5 * rho * u * u};
    };
    auto fl = fluxX(1.0, 0.0, 1.0), fr = fluxX(0.125, 0.0, 0.1);
    auto ul = cons(1.0, 0.0, 1.0), ur = cons(0.125, 0.0, 0.1);
    for (int c = 0; c < 4; ++c) {
        double ref =
            (sR * fl[c] - sL * fr[c] + sL * sR * (ur[c] - ul[c])) / (sR - sL);
        CHECK(g(c) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("HLLC against the exact Riemann solver") {
    Physics eu(SystemKind::Euler, 1.4);
    // Isolated contact: HLLC is exact.
    {
        State ql = euler(1.0, 0.4, 0.0, 1.0);
        State qr = euler(0.3, 0.4, 0.0, 1.0);
        Vec3 nt(1.0, 0.0, 0.0);
        State g = hllc1dAle(eu, ql, qr, nt);
        oracle::ExactRiemann ex({1.0, 0.4, 1.0}, {0.3, 0.4, 1.0}, 1.4);
        auto w = ex.sample(0.0);
        double E = w.p / 0.4 + 0.5 * w.rho * w.u * w.u;
        CHECK(g(0) == doctest::Approx(w.rho * w.u).epsilon(1e-12));
        CHECK(g(1) == doctest::Approx(w.rho * w.u * w.u + w.p).epsilon(1e-12));
        CHECK(g(3) == doctest::Approx(w.u * (E + w.p)).epsilon(1e-12));
    }
    // Generic pairs: within an HLL-family distance of the Godunov flux.
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int k = 0; k < 12; ++k) {
        oracle::Prim1D pl{0.4 + dist(rng), dist(rng) - 0.5, 0.4 + dist(rng)};
        oracle::Prim1D pr{0.4 + dist(rng), dist(rng) - 0.5, 0.4 + dist(rng)};
        State ql = euler(pl.rho, pl.u, 0.0, pl.p);
        State qr = euler(pr.rho, pr.u, 0.0, pr.p);
        State g = hllc1dAle(eu, ql, qr, Vec3(1.0, 0.0, 0.0));
        oracle::ExactRiemann ex(pl, pr, 1.4);
        auto w = ex.sample(0.0);
        double E = w.p / 0.4 + 0.5 * w.rho * w.u * w.u;
        double scale = std::abs(w.rho * w.u) + w.p + std::abs(w.u) * (E + w.p) + 1.0;
        CHECK(std::abs(g(0) - w.rho * w.u) <= 0.1 * scale);
        CHECK(std::abs(g(1) - (w.rho * w.u * w.u + w.p)) <= 0.1 * scale);
        CHECK(std::abs(g(3) - w.u * (E + w.p)) <= 0.1 * scale);
    }
}

TEST_CASE("node solver consistency on a uniform fan") {
    for (int which = 0; which < 2; ++which) {
        Physics phys = which == 0 ? Physics(SystemKind::Euler, 1.4)
                                  : Physics(SystemKind::Mhd, 5.0 / 3.0, 1.0);
        State q = which == 0 ? euler(1.3, 0.2, -0.4, 1.8)
                             : mhd(1.3, 0.2, -0.4, 1.8, 0.6, 0.3, 0.05,
                                   5.0 / 3.0, 1.0);
        NodeSolver ns(phys);
        std::vector<Vec2> eta;
        std::vector<double> ang = {0.1, 1.1, 2.4, 3.6, 5.0};
        for (double a : ang) eta.emplace_back(std::cos(a), std::sin(a));
        std::vector<State> fan(eta.size(), q);
        for (double w : {0.0, 1.0}) {
            NodeSolution sol = ns.solve(eta, fan, 0.01, w);
            CHECK((sol.qStar - q).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((sol.qC1 - q).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((sol.qC2 - q).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((sol.nodeVelocity - phys.velocity(q)).norm() <= 1e-13);
            Vec3 nt(0.6, -0.3, 0.2);
            nt.normalize();
            CHECK((ns.vertexFlux(sol, nt, eta[2]) - consistencyFlux(phys, q, nt))
                      .cwiseAbs()
                      .maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("node solver reduces to 1D HLL across a straight interface") {
    Physics eu(SystemKind::Euler, 1.4);
    NodeSolver ns(eu);
    State ql = euler(1.0, 0.2, 0.1, 1.0);
    State qr = euler(0.5, -0.3, 0.1, 0.7);
    for (double angle : {0.0, 0.37, 1.9, 4.2}) {
        CAPTURE(angle);
        Vec2 n(std::cos(angle), std::sin(angle));
        // Rotate the velocity so the configuration is the same 1D problem.
        auto rotated = [&](const State& q) {
            State prim = eu.toPrimitive(q);
            double u = prim(1), v = prim(2);
            prim(1) = u * n.x() - v * n.y();
            prim(2) = u * n.y() + v * n.x();
            return eu.fromPrimitive(prim);
        };
        State qlr = rotated(ql), qrr = rotated(qr);
        std::vector<Vec2> eta;
        std::vector<State> fan;
        planarFan(n, qlr, qrr, eta, fan);
        NodeSolution sol = ns.solve(eta, fan, 0.02);

        auto [sL, sR] = eu.eigenEstimatesNormal(qlr, qrr, n, 0.0);
        State star = (sR * qrr - sL * qlr + eu.fluxNormal(qlr, n) -
                      eu.fluxNormal(qrr, n)) /
                     (sR - sL);
        CHECK((sol.qStar - star).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("node solver rotation equivariance") {
    Physics eu(SystemKind::Euler, 1.4);
    NodeSolver ns(eu);
    std::vector<Vec2> eta = {{1.0, 0.0},
                             {std::cos(2.0), std::sin(2.0)},
                             {std::cos(4.3), std::sin(4.3)}};
    std::vector<State> fan = {euler(1.0, 0.3, 0.0, 1.0),
                              euler(0.8, -0.1, 0.4, 1.3),
                              euler(1.4, 0.0, -0.2, 0.9)};
    NodeSolution base = ns.solve(eta, fan, 0.01);

    double th = 2.0 * M_PI / 3.0;
    Mat2 R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    std::vector<Vec2> eta2;
    std::vector<State> fan2;
    for (std::size_t j = 0; j < eta.size(); ++j) {
        eta2.push_back(R * eta[j]);
        State prim = eu.toPrimitive(fan[j]);
        Vec2 v = R * Vec2(prim(1), prim(2));
        prim(1) = v.x();
        prim(2) = v.y();
        fan2.push_back(eu.fromPrimitive(prim));
    }
    NodeSolution rot = ns.solve(eta2, fan2, 0.01);
    CHECK(rot.qStar(0) == doctest::Approx(base.qStar(0)).epsilon(1e-12));
    CHECK(rot.qStar(3) == doctest::Approx(base.qStar(3)).epsilon(1e-12));
    Vec2 mom(base.qStar(1), base.qStar(2));
    Vec2 momR = R * mom;
    CHECK(rot.qStar(1) == doctest::Approx(momR.x()).epsilon(1e-11));
    CHECK(rot.qStar(2) == doctest::Approx(momR.y()).epsilon(1e-11));
}

TEST_CASE("contact split recovers the exact states of an isolated contact") {
    Physics eu(SystemKind::Euler, 1.4);
    NodeSolver ns(eu);
    double u = 0.5, p = 1.0;
    State ql = euler(1.0, u, 0.0, p);
    State qr = euler(0.25, u, 0.0, p);
    std::vector<Vec2> eta;
    std::vector<State> fan;
    planarFan(Vec2(1.0, 0.0), ql, qr, eta, fan);
    NodeSolution sol = ns.solve(eta, fan, 0.05, 1.0);
    REQUIRE(sol.split);
    CHECK(sol.contactSpeed == doctest::Approx(std::abs(u)).epsilon(1e-10));
    // qC1 trails the contact (here: the left/upwind side).
    CHECK((sol.qC1 - ql).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((sol.qC2 - qr).cwiseAbs().maxCoeff() <= 1e-8);

    // A co-moving face at the vertex sees the exact contact flux from both
    // solvers.
    Vec2 n(1.0, 0.0);
    Vec3 nt(n.x(), n.y(), -u);
    nt.normalize();
    State gNode = ns.vertexFlux(sol, nt, Vec2(0.0, 1.0));
    State g1d = hllc1dAle(eu, ql, qr, nt);
    CHECK((gNode - g1d).cwiseAbs().maxCoeff() <= 1e-8);

    // Blend weight 0 ignores the split entirely.
    NodeSolution hll = ns.solve(eta, fan, 0.05, 0.0);
    CHECK((ns.vertexFlux(sol, nt) - ns.vertexFlux(hll, nt)).cwiseAbs().maxCoeff() <=
          1e-12);
}

TEST_CASE("positivity fallback keeps the node flux finite") {
    Physics eu(SystemKind::Euler, 1.4);
    NodeSolver ns(eu);
    // Violent double rarefaction with near-vacuum pressure.
    State ql = euler(1.0, -8.0, 0.0, 1e-8);
    State qr = euler(1.0, 8.0, 0.0, 1e-8);
    std::vector<Vec2> eta;
    std::vector<State> fan;
    planarFan(Vec2(1.0, 0.0), ql, qr, eta, fan);
    NodeSolution sol = ns.solve(eta, fan, 0.01, 0.0);
    CHECK(eu.admissible(sol.qStar));
    Vec3 nt(0.0, 1.0, 0.0);
    State g = ns.vertexFlux(sol, nt, Vec2(1.0, 0.0));
    CHECK(g.allFinite());

    // The explicit last-resort path is admissible by construction.
    NodeSolution fb = ns.fallbackSolution(fan);
    CHECK(fb.fallback);
    CHECK(eu.admissible(fb.qStar));
    CHECK(ns.vertexFlux(fb, nt).allFinite());
}

TEST_CASE("node solver rejects bad fan geometry") {
    Physics eu(SystemKind::Euler, 1.4);
    NodeSolver ns(eu);
    State q = euler(1.0, 0.0, 0.0, 1.0);
    // Two edges cannot bound the wave-model polygon.
    CHECK_THROWS_AS(ns.solve({Vec2(1.0, 0.0), Vec2(-1.0, 0.0)}, {q, q}, 0.01),
                    SolverError);
    // Not counterclockwise.
    CHECK_THROWS_AS(ns.solve({Vec2(1.0, 0.0), Vec2(0.0, -1.0), Vec2(0.0, 1.0)},
                             {q, q, q}, 0.01),
                    SolverError);
}

TEST_CASE("compression sensor endpoints") {
    Physics eu(SystemKind::Euler, 1.4);
    std::vector<Vec2> eta;
    std::vector<State> fan;
    // Head-on collision: strong compression.
    planarFan(Vec2(1.0, 0.0), euler(1.0, 2.0, 0.0, 1.0),
              euler(1.0, -2.0, 0.0, 1.0), eta, fan);
    CHECK(compressionSensor(eu, eta, fan) == doctest::Approx(1.0));
    // Uniform flow: smooth.
    std::vector<State> uni(eta.size(), euler(1.0, 0.7, 0.2, 1.0));
    CHECK(compressionSensor(eu, eta, uni) == doctest::Approx(0.0));
    // Expansion: smooth.
    planarFan(Vec2(1.0, 0.0), euler(1.0, -1.0, 0.0, 1.0),
              euler(1.0, 1.0, 0.0, 1.0), eta, fan);
    CHECK(compressionSensor(eu, eta, fan) == doctest::Approx(0.0));
}
