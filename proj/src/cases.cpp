#include "alefv/cases.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include <fmt/format.h>

namespace alefv {

namespace {

State primEuler(double rho, double u, double v, double p) {
    State q(4);
    q << rho, u, v, p;
    return q;
}

State primMhd(double rho, double u, double v, double p, double bx, double by,
              double psi) {
    State q(7);
    q << rho, u, v, p, bx, by, psi;
    return q;
}

double wrap(double x, double period) {
    double y = std::fmod(x, period);
    return y < 0.0 ? y + period : y;
}

void applyFluxMode(StepperParams& p, const std::string& mode) {
    if (mode == "1d-hll") {
        p.fluxMode = FluxMode::Pure1D;
        p.edgeSolver = EdgeSolverKind::Hll;
    } else if (mode == "1d-hllc") {
        p.fluxMode = FluxMode::Pure1D;
        p.edgeSolver = EdgeSolverKind::Hllc;
    } else if (mode == "multid-hll") {
        p.fluxMode = FluxMode::MultiD;
        p.edgeSolver = EdgeSolverKind::Hll;
        p.nodeFlux = NodeFluxKind::Hll;
    } else if (mode == "multid-hllc") {
        p.fluxMode = FluxMode::MultiD;
        p.edgeSolver = EdgeSolverKind::Hllc;
        p.nodeFlux = NodeFluxKind::Hllc;
    } else if (mode == "blend") {
        p.fluxMode = FluxMode::MultiD;
        p.edgeSolver = EdgeSolverKind::Hllc;
        p.nodeFlux = NodeFluxKind::Blend;
    } else {
        throw SolverError(SolverError::Kind::Config,
                          fmt::format("unknown flux mode '{}'", mode));
    }
}

// ---------------------------------------------------------------- vortex --

// Convected isentropic vortex on [0,10]^2, strength eps = 5, gamma = 1.4.
State vortexPrim(const Vec2& x) {
    const double eps = 5.0, gamma = 1.4;
    double dx = x.x() - 5.0, dy = x.y() - 5.0;
    double r2 = dx * dx + dy * dy;
    double dT = -(gamma - 1.0) * eps * eps / (8.0 * gamma * M_PI * M_PI) *
                std::exp(1.0 - r2);
    double drho = std::pow(1.0 + dT, 1.0 / (gamma - 1.0)) - 1.0;
    double dp = std::pow(1.0 + dT, gamma / (gamma - 1.0)) - 1.0;
    double f = eps / (2.0 * M_PI) * std::exp(0.5 * (1.0 - r2));
    return primEuler(1.0 + drho, 1.0 - f * dy, 1.0 + f * dx, 1.0 + dp);
}

// MHD vortex (Balsara), eps = 1, mu = sqrt(4 pi), gamma = 5/3, on [0,10]^2.
State mhdVortexPrim(const Vec2& x) {
    const double eps = 1.0, mu = std::sqrt(4.0 * M_PI);
    double dx = x.x() - 5.0, dy = x.y() - 5.0;
    double r2 = dx * dx + dy * dy;
    double ev = std::exp(0.5 * (1.0 - r2)), e1 = std::exp(1.0 - r2);
    double fv = eps / (2.0 * M_PI) * ev;
    double fb = mu / (2.0 * M_PI) * ev;
    double dp = 1.0 / (8.0 * M_PI) * std::pow(mu / (2.0 * M_PI), 2) *
                    (1.0 - r2) * e1 -
                0.5 * std::pow(eps / (2.0 * M_PI), 2) * e1;
    // Zero-background field: the superposition of a uniform B with the
    // azimuthal perturbation is not an equilibrium (cross terms in the
    // magnetic tension), so only the perturbation carries the field.
    return primMhd(1.0, 1.0 - fv * dy, 1.0 + fv * dx, 1.0 + dp, -fb * dy,
                   fb * dx, 0.0);
}

// -------------------------------------------------------------- Saltzman --

// Piston-driven strong shock, gamma = 5/3: plateau (4, 1, 0, p = 4/3)
// between the piston x = t and the shock x = 4t/3.
State saltzmanRef(const Vec2& x, double t) {
    const double p0 = (5.0 / 3.0 - 1.0) * 1e-4;
    if (x.x() < 4.0 / 3.0 * t) return primEuler(4.0, 1.0, 0.0, 4.0 / 3.0);
    return primEuler(1.0, 0.0, 0.0, p0);
}

// ------------------------------------------------------------------- Noh --

State nohPreShock(const Vec2& x, double t) {
    double r = std::max(x.norm(), 1e-12);
    return primEuler(1.0 + t / r, -x.x() / r, -x.y() / r, 1e-6);
}

State nohRef(const Vec2& x, double t) {
    if (x.norm() < t / 3.0) return primEuler(16.0, 0.0, 0.0, 16.0 / 3.0);
    return nohPreShock(x, t);
}

}  // namespace

// ------------------------------------------------------ shell compression --

double ShellCompression::tau() const {
    double ci2 = gamma * std::pow(rhoi0, gamma - 1.0);
    double ce2 = gamma * std::pow(rhoe0, gamma - 1.0);
    return std::sqrt((gamma - 1.0) / 2.0 * (re0 * re0 - ri0 * ri0) /
                     (ce2 - ci2));
}

double ShellCompression::h(double t) const {
    double T = tau();
    return std::sqrt(1.0 - t * t / (T * T));
}

double ShellCompression::hdot(double t) const {
    double T = tau();
    return -t / (T * T * h(t));
}

double ShellCompression::rho0(double r) const {
    double den = re0 * re0 - ri0 * ri0;
    double a = (re0 * re0 - r * r) / den * std::pow(rhoi0, gamma - 1.0) +
               (r * r - ri0 * ri0) / den * std::pow(rhoe0, gamma - 1.0);
    return std::pow(a, 1.0 / (gamma - 1.0));
}

State ShellCompression::prim(const Vec2& x, double t) const {
    double R = x.norm();
    double ht = h(t);
    double r = R / ht;  // initial radius of the particle now at R
    double rho = std::pow(ht, -2.0 / (gamma - 1.0)) * rho0(r);
    double ur = hdot(t) * r;
    double p = std::pow(rho, gamma);  // uniform entropy s0 = 1
    Vec2 dir = R > 0.0 ? Vec2(x / R) : Vec2::Zero();
    State q(4);
    q << rho, ur * dir.x(), ur * dir.y(), p;
    return q;
}

// ------------------------------------------------- 1D cylindrical reference --

void RadialReference::sample(double radius, double& rhoOut, double& uOut,
                             double& pOut) const {
    auto it = std::lower_bound(r.begin(), r.end(), radius);
    if (it == r.begin()) {
        rhoOut = rho.front();
        uOut = u.front();
        pOut = p.front();
        return;
    }
    if (it == r.end()) {
        rhoOut = rho.back();
        uOut = u.back();
        pOut = p.back();
        return;
    }
    std::size_t i = static_cast<std::size_t>(it - r.begin());
    double w = (radius - r[i - 1]) / (r[i] - r[i - 1]);
    rhoOut = (1.0 - w) * rho[i - 1] + w * rho[i];
    uOut = (1.0 - w) * u[i - 1] + w * u[i];
    pOut = (1.0 - w) * p[i - 1] + w * p[i];
}

RadialReference solveCylindricalRiemann(double rhoIn, double pIn, double rhoOut,
                                        double pOut, double rInterface,
                                        double rMax, double gamma, double tEnd,
                                        int cells) {
    // MUSCL-Hancock with minmod slopes and an HLLC flux on
    // U = (rho, rho u, rho E), radial geometric source S = -(1/r) u (U + (0,0,p)).
    const double dr = rMax / cells;
    Eigen::MatrixXd U(3, cells);
    auto pressureOf = [&](const Eigen::Vector3d& q) {
        return (gamma - 1.0) * (q(2) - 0.5 * q(1) * q(1) / q(0));
    };
    for (int i = 0; i < cells; ++i) {
        double rc = (i + 0.5) * dr;
        double rho = rc <= rInterface ? rhoIn : rhoOut;
        double p = rc <= rInterface ? pIn : pOut;
        U.col(i) << rho, 0.0, p / (gamma - 1.0);
    }
    auto flux = [&](const Eigen::Vector3d& q) {
        double u = q(1) / q(0), p = pressureOf(q);
        return Eigen::Vector3d(q(1), q(1) * u + p, u * (q(2) + p));
    };
    auto hllc = [&](const Eigen::Vector3d& ql, const Eigen::Vector3d& qr) {
        double ul = ql(1) / ql(0), ur = qr(1) / qr(0);
        double pl = pressureOf(ql), pr = pressureOf(qr);
        double cl = std::sqrt(gamma * pl / ql(0)), cr = std::sqrt(gamma * pr / qr(0));
        double sl = std::min(ul - cl, ur - cr), sr = std::max(ul + cl, ur + cr);
        if (sl >= 0.0) return flux(ql);
        if (sr <= 0.0) return flux(qr);
        double sm = (pr - pl + ql(1) * (sl - ul) - qr(1) * (sr - ur)) /
                    (ql(0) * (sl - ul) - qr(0) * (sr - ur));
        auto star = [&](const Eigen::Vector3d& q, double s, double uu, double pp) {
            double f = q(0) * (s - uu) / (s - sm);
            Eigen::Vector3d qs;
            qs << f, f * sm,
                f * (q(2) / q(0) + (sm - uu) * (sm + pp / (q(0) * (s - uu))));
            return qs;
        };
        if (sm >= 0.0) return Eigen::Vector3d(flux(ql) + sl * (star(ql, sl, ul, pl) - ql));
        return Eigen::Vector3d(flux(qr) + sr * (star(qr, sr, ur, pr) - qr));
    };
    auto minmod = [](double a, double b) {
        if (a * b <= 0.0) return 0.0;
        return std::abs(a) < std::abs(b) ? a : b;
    };
    auto source = [&](const Eigen::Vector3d& q, double rc) {
        double u = q(1) / q(0), p = pressureOf(q);
        return Eigen::Vector3d(-q(0) * u / rc, -q(1) * u / rc,
                               -u * (q(2) + p) / rc);
    };

    double t = 0.0;
    Eigen::MatrixXd Un = U;
    while (t < tEnd) {
        double smax = 1e-12;
        for (int i = 0; i < cells; ++i) {
            double u = std::abs(U(1, i) / U(0, i));
            double c = std::sqrt(gamma * std::max(pressureOf(U.col(i)), 1e-14) /
                                 U(0, i));
            smax = std::max(smax, u + c);
        }
        double dt = std::min(0.45 * dr / smax, tEnd - t);

        // Slopes and half-step evolution.
        Eigen::MatrixXd slope = Eigen::MatrixXd::Zero(3, cells);
        for (int i = 1; i < cells - 1; ++i)
            for (int k = 0; k < 3; ++k)
                slope(k, i) =
                    minmod(U(k, i) - U(k, i - 1), U(k, i + 1) - U(k, i));
        Eigen::MatrixXd Ul(3, cells), Ur(3, cells);  // edge extrapolations
        for (int i = 0; i < cells; ++i) {
            Eigen::Vector3d dU = slope.col(i);
            Eigen::Vector3d qm = U.col(i) - 0.5 * dU;  // left edge
            Eigen::Vector3d qp = U.col(i) + 0.5 * dU;  // right edge
            Eigen::Vector3d dF = flux(qp) - flux(qm);
            double rc = (i + 0.5) * dr;
            Eigen::Vector3d half =
                -0.5 * dt / dr * dF + 0.5 * dt * source(U.col(i), rc);
            Ul.col(i) = qm + half;
            Ur.col(i) = qp + half;
        }
        for (int i = 0; i < cells; ++i) {
            double rc = (i + 0.5) * dr;
            // Reflective at r = 0, transmissive at r = rMax.
            Eigen::Vector3d ghostL = Ul.col(0);
            ghostL(1) = -ghostL(1);
            Eigen::Vector3d fm =
                i == 0 ? hllc(ghostL, Ul.col(i)) : hllc(Ur.col(i - 1), Ul.col(i));
            Eigen::Vector3d fp =
                i == cells - 1 ? hllc(Ur.col(i), Ur.col(i)) : hllc(Ur.col(i), Ul.col(i + 1));
            Un.col(i) = U.col(i) - dt / dr * (fp - fm) +
                        dt * source(0.5 * (Ul.col(i) + Ur.col(i)), rc);
        }
        U.swap(Un);
        t += dt;
    }

    RadialReference out;
    out.r.resize(cells);
    out.rho.resize(cells);
    out.u.resize(cells);
    out.p.resize(cells);
    for (int i = 0; i < cells; ++i) {
        out.r[i] = (i + 0.5) * dr;
        out.rho[i] = U(0, i);
        out.u[i] = U(1, i) / U(0, i);
        out.p[i] = pressureOf(U.col(i));
    }
    return out;
}

// ------------------------------------------------------------ registry --

std::vector<std::string> caseNames() {
    return {"vortex", "mhd-vortex", "explosion", "kidder", "saltzman",
            "noh",    "sedov",      "rotor",     "blast"};
}

CaseSetup buildCase(const RunConfig& cfg) {
    CaseSetup s;
    s.name = cfg.caseName;
    StepperParams& p = s.params;
    p.degree = cfg.order - 1;
    if (p.degree < 0 || p.degree > kMaxDegree)
        throw SolverError(SolverError::Kind::Config,
                          fmt::format("unsupported order {}", cfg.order));
    std::string flux = "multid-hllc";
    double cfl = 0.95;
    double tf = 0.0;
    int res;

    if (cfg.caseName == "vortex" || cfg.caseName == "mhd-vortex") {
        bool mhd = cfg.caseName == "mhd-vortex";
        res = cfg.meshRes > 0 ? cfg.meshRes : 40;
        s.mesh = makeSplitSquare(res, res, {0, 0}, {10, 10}, true);
        s.phys = mhd ? Physics(SystemKind::Mhd, 5.0 / 3.0, 2.0)
                     : Physics(SystemKind::Euler, 1.4);
        tf = 1.0;
        Physics ph = s.phys;
        if (mhd) {
            s.ic = [ph](const Vec2& x) { return ph.fromPrimitive(mhdVortexPrim(x)); };
            s.reference = [ph](const Vec2& x, double t) {
                Vec2 x0(wrap(x.x() - t, 10.0), wrap(x.y() - t, 10.0));
                return ph.fromPrimitive(mhdVortexPrim(x0));
            };
        } else {
            s.ic = [ph](const Vec2& x) { return ph.fromPrimitive(vortexPrim(x)); };
            s.reference = [ph](const Vec2& x, double t) {
                Vec2 x0(wrap(x.x() - t, 10.0), wrap(x.y() - t, 10.0));
                return ph.fromPrimitive(vortexPrim(x0));
            };
        }
    } else if (cfg.caseName == "explosion") {
        res = cfg.meshRes > 0 ? cfg.meshRes : 40;
        s.mesh = makeDisc(1.0, res);
        s.phys = Physics(SystemKind::Euler, 1.4);
        tf = 0.25;
        Physics ph = s.phys;
        s.ic = [ph](const Vec2& x) {
            return ph.fromPrimitive(x.norm() <= 0.5 ? primEuler(1, 0, 0, 1)
                                                    : primEuler(0.125, 0, 0, 0.1));
        };
        auto rad = std::make_shared<RadialReference>(
            solveCylindricalRiemann(1.0, 1.0, 0.125, 0.1, 0.5, 1.2, 1.4, 0.25));
        s.reference = [ph, rad](const Vec2& x, double) {
            double rho, u, pr;
            double r = x.norm();
            rad->sample(r, rho, u, pr);
            Vec2 dir = r > 1e-12 ? Vec2(x / r) : Vec2::Zero();
            return ph.fromPrimitive(
                primEuler(rho, u * dir.x(), u * dir.y(), pr));
        };
        s.radialProfile = true;
        // all boundaries transmissive (default)
    } else if (cfg.caseName == "kidder") {
        res = cfg.meshRes > 0 ? cfg.meshRes : 10;  // radial cells across the shell
        ShellCompression shell;
        int ntheta = std::max(
            4, static_cast<int>(std::round(res * (M_PI / 2.0) * 0.95 / 0.1)));
        s.mesh = makePolarSector(shell.ri0, shell.re0, 0.0, M_PI / 2.0, res,
                                 ntheta);
        s.phys = Physics(SystemKind::Euler, shell.gamma);
        tf = std::sqrt(3.0) / 2.0 * shell.tau();
        Physics ph = s.phys;
        s.ic = [ph, shell](const Vec2& x) {
            return ph.fromPrimitive(shell.prim(x, 0.0));
        };
        s.reference = [ph, shell](const Vec2& x, double t) {
            return ph.fromPrimitive(shell.prim(x, t));
        };
        s.mesh.tagBoundary([shell](const Vec2& a, const Vec2& b) {
            double r = (0.5 * (a + b)).norm();
            if (r < 0.5 * (shell.ri0 + shell.re0))
                return r < 0.95 * shell.ri0 + 0.05 * shell.re0 ? 1 : 3;
            return r > 0.05 * shell.ri0 + 0.95 * shell.re0 ? 2 : 3;
        });
        BoundaryCondition exact;
        exact.kind = BoundaryCondition::Kind::Dirichlet;
        exact.state = [ph, shell](const Vec2& x, double t) {
            return ph.fromPrimitive(shell.prim(x, t));
        };
        s.bcs[1] = exact;
        s.bcs[2] = exact;
        BoundaryCondition slip;
        slip.kind = BoundaryCondition::Kind::SlipWall;
        s.bcs[3] = slip;
        s.radialProfile = true;
    } else if (cfg.caseName == "saltzman") {
        res = cfg.meshRes > 0 ? cfg.meshRes : 10;
        s.mesh = makeSplitSquare(10 * res, res, {0, 0}, {1, 0.1});
        // Classical skewed initial mesh.
        for (auto& v : s.mesh.vertex)
            v.x() += (0.1 - v.y()) * std::sin(M_PI * v.x());
        s.mesh.finalize();
        s.phys = Physics(SystemKind::Euler, 5.0 / 3.0);
        tf = 0.6;
        cfl = 0.7;
        flux = "multid-hll";
        Physics ph = s.phys;
        s.ic = [ph](const Vec2&) {
            return ph.fromPrimitive(primEuler(1.0, 0.0, 0.0, (5.0 / 3.0 - 1.0) * 1e-4));
        };
        s.reference = [ph](const Vec2& x, double t) {
            return ph.fromPrimitive(saltzmanRef(x, t));
        };
        s.mesh.tagBoundary([](const Vec2& a, const Vec2& b) {
            return 0.5 * (a + b).x() < 1e-9 ? 1 : 2;
        });
        BoundaryCondition piston;
        piston.kind = BoundaryCondition::Kind::MovingWall;
        piston.wallVelocity = [](const Vec2&, double) { return Vec2(1.0, 0.0); };
        s.bcs[1] = piston;
        BoundaryCondition slip;
        slip.kind = BoundaryCondition::Kind::SlipWall;
        s.bcs[2] = slip;
    } else if (cfg.caseName == "noh") {
        res = cfg.meshRes > 0 ? cfg.meshRes : 50;
        s.mesh = makeSplitSquare(res, res, {0, 0}, {1, 1});
        s.phys = Physics(SystemKind::Euler, 5.0 / 3.0);
        tf = 0.6;
        cfl = 0.9;
        flux = "multid-hll";
        p.rezone = true;
        Physics ph = s.phys;
        s.ic = [ph](const Vec2& x) { return ph.fromPrimitive(nohPreShock(x, 0.0)); };
        s.reference = [ph](const Vec2& x, double t) {
            return ph.fromPrimitive(nohRef(x, t));
        };
        s.mesh.tagBoundary([](const Vec2& a, const Vec2& b) {
            Vec2 m = 0.5 * (a + b);
            return (m.x() < 1e-9 || m.y() < 1e-9) ? 1 : 2;
        });
        BoundaryCondition slip;
        slip.kind = BoundaryCondition::Kind::SlipWall;
        s.bcs[1] = slip;
        BoundaryCondition inflow;
        inflow.kind = BoundaryCondition::Kind::Dirichlet;
        inflow.state = [ph](const Vec2& x, double t) {
            return ph.fromPrimitive(nohPreShock(x, t));
        };
        s.bcs[2] = inflow;
        s.radialProfile = true;
    } else if (cfg.caseName == "sedov") {
        res = cfg.meshRes > 0 ? cfg.meshRes : 30;
        s.mesh = makeSplitSquare(res, res, {0, 0}, {1.2, 1.2});
        s.phys = Physics(SystemKind::Euler, 1.4);
        tf = 1.0;
        p.rezone = true;
        flux = "multid-hll";
        Physics ph = s.phys;
        s.ic = [ph](const Vec2&) {
            return ph.fromPrimitive(primEuler(1.0, 0.0, 0.0, 1e-6));
        };
        // Energy deposition: the two triangles of the origin square carry
        // the released energy eps0 in total.
        const double eps0 = 0.244816;
        double vOr = 0.0;
        std::vector<int> origin;
        for (int t = 0; t < s.mesh.numElements(); ++t) {
            bool atOrigin = false;
            for (int c = 0; c < 3; ++c)
                if (s.mesh.cornerPos(t, c).norm() < 1e-12) atOrigin = true;
            if (atOrigin) {
                origin.push_back(t);
                vOr += s.mesh.volume(t);
            }
        }
        for (int t : origin) {
            State q(4);
            q << 1.0, 0.0, 0.0, eps0 / vOr;  // rho E = p_or/(gamma-1)
            s.averageOverride[t] = q;
        }
        s.mesh.tagBoundary([](const Vec2&, const Vec2&) { return 1; });
        BoundaryCondition slip;
        slip.kind = BoundaryCondition::Kind::SlipWall;
        s.bcs[1] = slip;
        s.radialProfile = true;
    } else if (cfg.caseName == "rotor") {
        res = cfg.meshRes > 0 ? cfg.meshRes : 30;
        s.mesh = makeDisc(0.5, res);
        s.phys = Physics(SystemKind::Mhd, 1.4, 2.0);
        tf = 0.25;
        flux = "multid-hll";
        Physics ph = s.phys;
        s.ic = [ph](const Vec2& x) {
            double r = x.norm();
            double rho = 1.0, vt = 0.0;
            if (r <= 0.1) {
                rho = 10.0;
                vt = 10.0 * r;
            } else if (r <= 0.13) {
                double f = (0.13 - r) / 0.03;
                rho = 1.0 + 9.0 * f;
                vt = f;
            }
            Vec2 dir = r > 1e-12 ? Vec2(-x.y() / r, x.x() / r) : Vec2::Zero();
            return ph.fromPrimitive(
                primMhd(rho, vt * dir.x(), vt * dir.y(), 1.0, 2.5, 0.0, 0.0));
        };
        s.radialProfile = true;
    } else if (cfg.caseName == "blast") {
        res = cfg.meshRes > 0 ? cfg.meshRes : 40;
        s.mesh = makeDisc(1.0, res);
        s.phys = Physics(SystemKind::Mhd, 1.4, 50.0);
        tf = 0.01;
        flux = "multid-hll";
        p.rezone = true;
        Physics ph = s.phys;
        s.ic = [ph](const Vec2& x) {
            double pr = x.norm() <= 0.1 ? 1000.0 : 0.1;
            return ph.fromPrimitive(primMhd(1.0, 0.0, 0.0, pr, 70.0, 0.0, 0.0));
        };
        s.radialProfile = true;
    } else {
        throw SolverError(SolverError::Kind::Config,
                          fmt::format("unknown case '{}'", cfg.caseName));
    }

    if (!cfg.fluxMode.empty()) flux = cfg.fluxMode;
    applyFluxMode(p, flux);
    if (cfg.cfl > 0.0)
        cfl = cfg.cfl;
    else if (p.fluxMode == FluxMode::Pure1D)
        cfl = std::min(cfl, 0.45);
    p.cfl = cfl;
    if (cfg.rezone >= 0) p.rezone = cfg.rezone != 0;
    if (!cfg.motion.empty()) {
        if (cfg.motion == "eulerian")
            p.motion = MeshMotionMode::Eulerian;
        else if (cfg.motion == "lagrangian")
            p.motion = MeshMotionMode::Lagrangian;
        else
            throw SolverError(SolverError::Kind::Config,
                              fmt::format("unknown motion mode '{}'", cfg.motion));
    }
    s.tFinal = cfg.tFinal > 0.0 ? cfg.tFinal : tf;
    return s;
}

Stepper makeStepper(const CaseSetup& setup) {
    Stepper st(setup.mesh, setup.phys, setup.params);
    for (const auto& [tag, bc] : setup.bcs) st.setBoundary(tag, bc);
    int quadDegree = std::min(8, 2 * setup.params.degree + 3);
    st.setInitialCondition(setup.ic, quadDegree);
    if (!setup.averageOverride.empty()) {
        Eigen::MatrixXd q = st.averages();
        for (const auto& [elem, avg] : setup.averageOverride)
            q.row(elem) = avg.transpose();
        st.setAverages(q);
    }
    return st;
}

double meshSize(const TriMesh& mesh) { return mesh.maxCircumDiameter(); }

ErrorNorms errorNorms(const Stepper& st,
                      const std::function<State(const Vec2&, double)>& ref,
                      double t, int var, int quadDegree) {
    const TriMesh& mesh = st.mesh();
    WenoReconstructor weno(mesh, st.params().degree, st.params().weno);
    Eigen::MatrixXd avgByVar = st.averages().transpose();
    std::vector<RecCoeffs> coeffs;
    weno.reconstruct(mesh, avgByVar, coeffs);
    const TriQuadRule& rule = triangleQuadrature(quadDegree);
    ErrorNorms e;
    for (int i = 0; i < mesh.numElements(); ++i) {
        ReferenceMap map = mesh.refMap(i);
        double vol2 = 2.0 * mesh.volume(i);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2& xi = rule.points[q];
            double wh = WenoReconstructor::evaluate(weno.basis(), coeffs[i],
                                                    xi.x(), xi.y())(var);
            double we = ref(map.toPhys(xi), t)(var);
            double d = std::abs(wh - we);
            e.l1 += vol2 * rule.weights[q] * d;
            e.l2 += vol2 * rule.weights[q] * d * d;
        }
    }
    e.l2 = std::sqrt(e.l2);
    return e;
}

RunResult runCase(Stepper& st, const CaseSetup& setup, int maxSteps,
                  const std::function<void(const Stepper&, int)>& onStep) {
    RunResult res;
    auto t0 = std::chrono::steady_clock::now();
    while (st.time() < setup.tFinal - 1e-12 && res.steps < maxSteps) {
        double dt = std::min(st.computeTimestep(), setup.tFinal - st.time());
        st.step(dt);
        ++res.steps;
        if (onStep) onStep(st, res.steps);
    }
    res.wallSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.tEnd = st.time();
    res.totalConserved = st.totalConserved();
    if (setup.reference) {
        res.errors = errorNorms(st, setup.reference, st.time(), 0,
                                std::min(8, 2 * st.params().degree + 3));
        res.hasErrors = true;
    }
    return res;
}

}  // namespace alefv
