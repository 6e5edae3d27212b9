#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "alefv/cases.hpp"
#include "alefv/config.hpp"
#include "alefv/io.hpp"

using namespace alefv;

namespace {

RunConfig quickConfig(const std::string& name, int order = 2, int meshRes = -1) {
    RunConfig cfg;
    cfg.caseName = name;
    cfg.order = order;
    cfg.meshRes = meshRes;
    return cfg;
}

}  // namespace

TEST_CASE("vortex initial condition decays to the background state") {
    CaseSetup s = buildCase(quickConfig("vortex", 2, 10));
    State far = s.phys.toPrimitive(s.ic(Vec2(0.1, 0.1)));  // r ~ 6.9
    State bg(4);
    bg << 1, 1, 1, 1;
    CHECK((far - bg).cwiseAbs().maxCoeff() <= 1e-9);
    // Center: strong, admissible perturbation.
    State center = s.phys.toPrimitive(s.ic(Vec2(5.0, 5.0)));
    CHECK(center(0) < 1.0);
    CHECK(center(0) > 0.0);
    // Reference at t=0 equals the IC.
    CHECK((s.reference(Vec2(3.3, 6.1), 0.0) - s.ic(Vec2(3.3, 6.1))).norm() <= 1e-13);
    // Convection by (1,1): reference at t is the shifted IC.
    CHECK((s.reference(Vec2(4.0, 4.0), 0.25) - s.ic(Vec2(3.75, 3.75))).norm() <= 1e-13);
}

TEST_CASE("MHD vortex matches its stated background and units") {
    CaseSetup s = buildCase(quickConfig("mhd-vortex", 2, 10));
    State far = s.phys.toPrimitive(s.ic(Vec2(0.0, 0.0)));
    State bg(7);
    bg << 1, 1, 1, 1, 0, 0, 0;  // field-free background, perturbation only
    CHECK((far - bg).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(s.phys.cleaningSpeed() == 2.0);
    CHECK(s.phys.gamma() == doctest::Approx(5.0 / 3.0));

    // The convected vortex must be an exact solution: the PDE residual
    // div F(q0) - v_c . grad q0 of the initial field vanishes.
    auto q = [&](const Vec2& x) { return s.ic(x); };
    const double h = 1e-5;
    const Vec2 vc(1.0, 1.0);
    double worst = 0.0;
    for (double X = 4.0; X <= 6.01; X += 0.4) {
        for (double Y = 4.0; Y <= 6.01; Y += 0.4) {
            State fxp, gxp, fxm, gxm, fyp, gyp, fym, gym;
            s.phys.flux(q({X + h, Y}), fxp, gxp);
            s.phys.flux(q({X - h, Y}), fxm, gxm);
            s.phys.flux(q({X, Y + h}), fyp, gyp);
            s.phys.flux(q({X, Y - h}), fym, gym);
            State res = (fxp - fxm) / (2 * h) + (gyp - gym) / (2 * h) -
                        vc.x() * (q({X + h, Y}) - q({X - h, Y})) / (2 * h) -
                        vc.y() * (q({X, Y + h}) - q({X, Y - h})) / (2 * h);
            worst = std::max(worst, res.cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("explosion inner and outer states") {
    CaseSetup s = buildCase(quickConfig("explosion", 2, 6));
    State in = s.phys.toPrimitive(s.ic(Vec2(0.1, 0.2)));
    State out = s.phys.toPrimitive(s.ic(Vec2(0.6, 0.5)));
    State expIn(4), expOut(4);
    expIn << 1.0, 0.0, 0.0, 1.0;
    expOut << 0.125, 0.0, 0.0, 0.1;
    CHECK((in - expIn).norm() <= 1e-14);
    CHECK((out - expOut).norm() <= 1e-14);
}

TEST_CASE("shell compression exact solution") {
    ShellCompression sh;
    // Boundary densities at t=0.
    CHECK(sh.rho0(sh.ri0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sh.rho0(sh.re0) == doctest::Approx(2.0).epsilon(1e-13));
    // Uniform entropy: p0 = rho0^gamma.
    State prim = sh.prim(Vec2(0.95, 0.0), 0.0);
    CHECK(prim(3) == doctest::Approx(std::pow(prim(0), 2.0)).epsilon(1e-13));
    CHECK(prim(1) == 0.0);
    // At tf = sqrt(3)/2 tau the homothety rate is 1/2: shell in [0.45, 0.5].
    double tf = std::sqrt(3.0) / 2.0 * sh.tau();
    CHECK(sh.h(tf) == doctest::Approx(0.5).epsilon(1e-12));
    // The particle starting at the outer frontier is at 0.5 and keeps
    // following R(r,t) = h r with inward velocity hdot r.
    State pe = sh.prim(Vec2(0.5, 0.0), tf);
    CHECK(pe(1) == doctest::Approx(sh.hdot(tf) * 1.0).epsilon(1e-12));
    CHECK(pe(1) < 0.0);
    // Isentropic compression: entropy stays exactly 1.
    CHECK(pe(3) / (pe(0) * pe(0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Saltzman and Noh reference states") {
    CaseSetup sz = buildCase(quickConfig("saltzman"));
    CHECK(sz.params.cfl == doctest::Approx(0.7));
    State plateau = sz.phys.toPrimitive(sz.reference(Vec2(0.7, 0.05), 0.6));
    CHECK(plateau(0) == doctest::Approx(4.0));
    CHECK(plateau(1) == doctest::Approx(1.0));
    State ahead = sz.phys.toPrimitive(sz.reference(Vec2(0.85, 0.05), 0.6));
    CHECK(ahead(0) == doctest::Approx(1.0));
    // Shock exactly at x = 0.8 when t = 0.6.
    CHECK(sz.phys.toPrimitive(sz.reference(Vec2(0.799, 0.05), 0.6))(0) ==
          doctest::Approx(4.0));

    CaseSetup noh = buildCase(quickConfig("noh"));
    State post = noh.phys.toPrimitive(noh.reference(Vec2(0.1, 0.1), 0.6));
    CHECK(post(0) == doctest::Approx(16.0));
    CHECK(post(3) == doctest::Approx(16.0 / 3.0));
    // Pre-shock compression rho = 1 + t/r just outside the shock.
    State pre = noh.phys.toPrimitive(noh.reference(Vec2(0.3, 0.0), 0.6));
    CHECK(pre(0) == doctest::Approx(1.0 + 0.6 / 0.3));
    CHECK(pre(1) == doctest::Approx(-1.0));
}

TEST_CASE("Sedov energy deposition integrates to the released energy") {
    CaseSetup s = buildCase(quickConfig("sedov"));
    REQUIRE(s.averageOverride.size() == 2);
    double total = 0.0;
    for (const auto& [elem, q] : s.averageOverride)
        total += s.mesh.volume(elem) * q(3);
    CHECK(total == doctest::Approx(0.244816).epsilon(1e-12));
}

TEST_CASE("cylindrical reference solver: explosion structure at t=0.25") {
    RadialReference ref =
        solveCylindricalRiemann(1.0, 1.0, 0.125, 0.1, 0.5, 1.2, 1.4, 0.25, 3000);
    double rho, u, p;
    // Undisturbed core inside the inward rarefaction.
    ref.sample(0.1, rho, u, p);
    CHECK(rho == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(u) <= 1e-3);
    // Undisturbed far field beyond the shock.
    ref.sample(1.15, rho, u, p);
    CHECK(rho == doctest::Approx(0.125).epsilon(1e-3));
    CHECK(p == doctest::Approx(0.1).epsilon(1e-3));
    // Outward shock: density overshoot between contact and shock.
    double rhoMax = 0.0, rShock = 0.0;
    for (std::size_t i = 0; i < ref.r.size(); ++i) {
        if (ref.r[i] > 0.55 && ref.rho[i] > rhoMax) rhoMax = ref.rho[i];
        if (ref.r[i] < 1.1 && ref.u[i] > 1e-3) rShock = ref.r[i];
    }
    CHECK(rhoMax > 0.2);
    CHECK(rShock > 0.7);
    CHECK(rShock < 1.0);
}

TEST_CASE("error norms: exact field and constant offset") {
    RunConfig cfg = quickConfig("vortex", 2, 8);
    CaseSetup s = buildCase(cfg);
    Stepper st = makeStepper(s);
    // Uniform field against a matching constant reference: zero error; then
    // a constant offset delta over area A = 100 gives L1 = delta A and
    // L2 = delta sqrt(A) exactly.
    State uni = s.phys.fromPrimitive([] {
        State q(4);
        q << 1, 1, 1, 1;
        return q;
    }());
    Eigen::MatrixXd q = st.averages();
    for (int i = 0; i < q.rows(); ++i) q.row(i) = uni.transpose();
    st.setAverages(q);
    auto constantRef = [&](const Vec2&, double) { return uni; };
    ErrorNorms e0 = errorNorms(st, constantRef, 0.0);
    CHECK(e0.l1 <= 1e-12);
    CHECK(e0.l2 <= 1e-12);

    double delta = 0.3;
    q.col(0).array() += delta;
    st.setAverages(q);
    ErrorNorms e1 = errorNorms(st, constantRef, 0.0);
    CHECK(e1.l1 == doctest::Approx(delta * 100.0).epsilon(1e-10));
    CHECK(e1.l2 == doctest::Approx(delta * 10.0).epsilon(1e-10));
}

TEST_CASE("unknown case and bad order are config errors") {
    CHECK_THROWS_AS(buildCase(quickConfig("warp-core")), SolverError);
    RunConfig cfg = quickConfig("vortex");
    cfg.order = 7;
    CHECK_THROWS_AS(buildCase(cfg), SolverError);
    cfg.order = 2;
    cfg.fluxMode = "psychic";
    CHECK_THROWS_AS(buildCase(cfg), SolverError);
    // Pure-1D defaults to the classical CFL limit.
    cfg.fluxMode = "1d-hll";
    CHECK(buildCase(cfg).params.cfl == doctest::Approx(0.45));
}

TEST_CASE("config parsing, overrides, and validation") {
    const char* path = "test_config_tmp.cfg";
    {
        std::ofstream f(path);
        f << "# benchmark configuration\n";
        f << "case = vortex\n";
        f << "order = 3   # third order\n";
        f << "cfl=0.9\n\n";
        f << "mesh = 20\n";
    }
    auto kv = parseConfigFile(path);
    CHECK(kv.at("case") == "vortex");
    CHECK(kv.at("order") == "3");
    applyOverrides(kv, {"order=4", "rezone=on"});
    RunConfig cfg = toRunConfig(kv);
    CHECK(cfg.order == 4);
    CHECK(cfg.cfl == doctest::Approx(0.9));
    CHECK(cfg.meshRes == 20);
    CHECK(cfg.rezone == 1);

    kv["banana"] = "1";
    CHECK_THROWS_AS(toRunConfig(kv), SolverError);
    kv.erase("banana");
    kv["order"] = "three";
    CHECK_THROWS_AS(toRunConfig(kv), SolverError);
    kv.erase("case");
    kv["order"] = "3";
    CHECK_THROWS_AS(toRunConfig(kv), SolverError);
    CHECK_THROWS_AS(parseConfigFile("no_such_file.cfg"), SolverError);
    std::remove(path);
}

TEST_CASE("snapshot round trip is bit exact") {
    CaseSetup s = buildCase(quickConfig("explosion", 2, 5));
    Stepper st = makeStepper(s);
    const char* path = "test_snapshot_tmp.vtk";
    writeSnapshot(st.mesh(), st.physics(), st.averages(), path);
    Snapshot snap = readSnapshot(path, st.physics().numVars());
    REQUIRE(snap.averages.rows() == st.averages().rows());
    CHECK((snap.averages - st.averages()).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < st.mesh().numVertices(); ++k)
        CHECK((snap.mesh.vertex[k] - st.mesh().vertex[k]).norm() == 0.0);
    for (int t = 0; t < st.mesh().numElements(); ++t)
        CHECK(snap.mesh.tri[t] == st.mesh().tri[t]);
    std::remove(path);

    // Radial profile: sorted by radius.
    const char* csv = "test_profile_tmp.csv";
    writeRadialProfile(st.mesh(), st.averages(), csv);
    std::ifstream f(csv);
    std::string line;
    std::getline(f, line);
    CHECK(line == "r,rho");
    double prev = -1.0;
    int rows = 0;
    while (std::getline(f, line)) {
        double r = std::stod(line.substr(0, line.find(',')));
        CHECK(r >= prev);
        prev = r;
        ++rows;
    }
    CHECK(rows == st.mesh().numElements());
    std::remove(csv);
}
