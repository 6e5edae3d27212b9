#include "alefv/riemann.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace alefv {

namespace {

inline double cross2(const Vec2& a, const Vec2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

inline Vec2 rot90ccw(const Vec2& v) { return {-v.y(), v.x()}; }

// Lab-frame Riemann problem across fan edge j.  Left/right refer to the
// tau_j coordinate (tau = rot90ccw(eta)).
struct Rp1D {
    double sL = 0.0, sR = 0.0, sStar = 0.0;
    State hllStar;
    State starL, starR;  // contact-split middle states
    bool hasContact = false;
};

Rp1D solveRp(const Physics& phys, const State& ql, const State& qr, const Vec2& n) {
    Rp1D rp;
    auto [sL, sR] = phys.eigenEstimatesNormal(ql, qr, n, 0.0);
    double ref = std::max({std::abs(sL), std::abs(sR),
                           phys.maxAbsEigenvalue(ql), phys.maxAbsEigenvalue(qr)});
    if (!(sR - sL > 1e-12 * (ref + 1e-300))) {
        double s = std::max(ref, 1e-300);
        sL = -s;
        sR = s;
    }
    rp.sL = sL;
    rp.sR = sR;
    State fl = phys.fluxNormal(ql, n), fr = phys.fluxNormal(qr, n);
    rp.hllStar = (sR * qr - sL * ql + fl - fr) / (sR - sL);
    rp.starL = rp.hllStar;
    rp.starR = rp.hllStar;
    rp.sStar = 0.5 * (sL + sR);

    if (phys.kind() != SystemKind::Euler) return rp;

    double rhol = ql(0), rhor = qr(0);
    double ul = (ql(1) * n.x() + ql(2) * n.y()) / rhol;
    double ur = (qr(1) * n.x() + qr(2) * n.y()) / rhor;
    double pl = phys.pressure(ql), pr = phys.pressure(qr);
    double denom = rhol * (sL - ul) - rhor * (sR - ur);
    if (std::abs(denom) < 1e-12 * (rhol * ref + rhor * ref + 1e-300)) return rp;
    double sStar =
        (pr - pl + rhol * ul * (sL - ul) - rhor * ur * (sR - ur)) / denom;
    if (!(sStar > sL && sStar < sR)) return rp;

    auto starState = [&](const State& q, double u, double p, double s) {
        double rho = q(0);
        double fac = rho * (s - u) / (s - sStar);
        State out(4);
        out(0) = fac;
        out(1) = fac * (q(1) / rho + (sStar - u) * n.x());
        out(2) = fac * (q(2) / rho + (sStar - u) * n.y());
        double pStar = p + rho * (s - u) * (sStar - u);
        out(3) = (q(3) * (s - u) + pStar * sStar - p * u) / (s - sStar);
        return out;
    };
    rp.starL = starState(ql, ul, pl, sL);
    rp.starR = starState(qr, ur, pr, sR);
    rp.sStar = sStar;
    rp.hasContact = true;
    return rp;
}

// Polygon from half-plane distances d_j along eta_j: vertex P[j] is the
// intersection of lines x.eta_j = d_j and x.eta_{j+1} = d_{j+1}.  Returns
// false when a redundant half-plane makes the chain non-simple.
bool buildPolygon(const std::vector<Vec2>& eta, const std::vector<double>& d,
                  std::vector<Vec2>& P, std::vector<double>& len, double& area) {
    const int n = static_cast<int>(eta.size());
    P.resize(n);
    len.resize(n);
    double scale = 1e-300;
    for (double v : d) scale = std::max(scale, std::abs(v));
    for (int j = 0; j < n; ++j) {
        int k = (j + 1) % n;
        double det = cross2(eta[j], eta[k]);
        P[j] = Vec2(eta[k].y() * d[j] - eta[j].y() * d[k],
                    eta[j].x() * d[k] - eta[k].x() * d[j]) /
               det;
    }
    area = 0.0;
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n;
        Vec2 tau = rot90ccw(eta[j]);
        double l = P[j].dot(tau) - P[jm].dot(tau);
        if (l < -1e-10 * scale) return false;
        len[j] = std::max(l, 0.0);
        area += 0.5 * len[j] * d[j];
    }
    return area > 1e-14 * scale * scale;
}

}  // namespace

State hll1dAle(const Physics& phys, const State& qm, const State& qp,
               const Vec3& ntilde) {
    Vec2 nsp(ntilde.x(), ntilde.y());
    double nlen = nsp.norm();
    if (!(nlen > 0.0))
        throw SolverError(SolverError::Kind::Geometry,
                          "space-time face normal has no spatial part");
    Vec2 nhat = nsp / nlen;
    double Vn = -ntilde.z() / nlen;
    auto [sL, sR] = phys.eigenEstimatesNormal(qm, qp, nhat, Vn);
    State fm = phys.fluxAle(qm, nhat, Vn);
    State fp = phys.fluxAle(qp, nhat, Vn);
    double ref = std::max(std::abs(sL), std::abs(sR)) + 1e-300;
    if (!(sR - sL > 1e-12 * ref)) {
        double s = std::max(phys.maxAbsEigenvalue(qm), phys.maxAbsEigenvalue(qp)) +
                   std::abs(Vn);
        return nlen * (0.5 * (fm + fp) - 0.5 * s * (qp - qm)).eval();
    }
    double a = std::min(sL, 0.0), b = std::max(sR, 0.0);
    return nlen * ((b * fm - a * fp + a * b * (qp - qm)) / (b - a)).eval();
}

State hllc1dAle(const Physics& phys, const State& qm, const State& qp,
                const Vec3& ntilde) {
    if (phys.kind() != SystemKind::Euler) return hll1dAle(phys, qm, qp, ntilde);
    Vec2 nsp(ntilde.x(), ntilde.y());
    double nlen = nsp.norm();
    if (!(nlen > 0.0))
        throw SolverError(SolverError::Kind::Geometry,
                          "space-time face normal has no spatial part");
    Vec2 nhat = nsp / nlen;
    double Vn = -ntilde.z() / nlen;
    auto [sL, sR] = phys.eigenEstimatesNormal(qm, qp, nhat, Vn);
    double ref = std::max(std::abs(sL), std::abs(sR)) + 1e-300;
    if (!(sR - sL > 1e-12 * ref)) return hll1dAle(phys, qm, qp, ntilde);
    if (sL >= 0.0) return nlen * phys.fluxAle(qm, nhat, Vn).eval();
    if (sR <= 0.0) return nlen * phys.fluxAle(qp, nhat, Vn).eval();

    double rhom = qm(0), rhop = qp(0);
    double um = (qm(1) * nhat.x() + qm(2) * nhat.y()) / rhom - Vn;
    double up = (qp(1) * nhat.x() + qp(2) * nhat.y()) / rhop - Vn;
    double pm = phys.pressure(qm), pp = phys.pressure(qp);
    double denom = rhom * (sL - um) - rhop * (sR - up);
    if (std::abs(denom) < 1e-12 * ((rhom + rhop) * ref + 1e-300))
        return hll1dAle(phys, qm, qp, ntilde);
    double sStar = (pp - pm + rhom * um * (sL - um) - rhop * up * (sR - up)) / denom;

    auto starState = [&](const State& q, double u, double p, double s) {
        double rho = q(0);
        double fac = rho * (s - u) / (s - sStar);
        State out(4);
        out(0) = fac;
        out(1) = fac * (q(1) / rho + (sStar - u) * nhat.x());
        out(2) = fac * (q(2) / rho + (sStar - u) * nhat.y());
        double pStar = p + rho * (s - u) * (sStar - u);
        out(3) = (q(3) * (s - u) + pStar * (sStar + Vn) - p * (u + Vn)) / (s - sStar);
        return out;
    };
    State G;
    if (sStar >= 0.0)
        G = phys.fluxAle(qm, nhat, Vn) + sL * (starState(qm, um, pm, sL) - qm);
    else
        G = phys.fluxAle(qp, nhat, Vn) + sR * (starState(qp, up, pp, sR) - qp);
    return nlen * G.eval();
}

NodeSolution NodeSolver::fallbackSolution(const std::vector<State>& q) const {
    const int nv = phys_.numVars();
    State prim = State::Zero(nv);
    for (const State& s : q) prim += phys_.toPrimitive(s);
    prim /= static_cast<double>(q.size());
    NodeSolution sol;
    sol.qStar = phys_.fromPrimitive(prim);
    sol.qC1 = sol.qStar;
    sol.qC2 = sol.qStar;
    sol.nodeVelocity = Vec2(prim(1), prim(2));
    sol.fallback = true;
    return sol;
}

NodeSolution NodeSolver::solve(const std::vector<Vec2>& eta,
                               const std::vector<State>& q, double dt,
                               double hllcWeight) const {
    const int n = static_cast<int>(eta.size());
    if (n < 3 || q.size() != eta.size())
        throw SolverError(SolverError::Kind::Geometry,
                          fmt::format("vertex fan needs >= 3 edges, got {}", n));
    double turn = 0.0;
    for (int j = 0; j < n; ++j) {
        int k = (j + 1) % n;
        double cr = cross2(eta[j], eta[k]);
        if (!(cr > 1e-12))
            throw SolverError(SolverError::Kind::Geometry,
                              "fan edge directions are not strictly counterclockwise");
        turn += std::atan2(cr, eta[j].dot(eta[k]));
    }
    if (std::abs(turn - 2.0 * M_PI) > 1e-9)
        throw SolverError(SolverError::Kind::Geometry,
                          "fan does not wrap once around the vertex");
    for (const State& s : q) phys_.requireAdmissible(s);

    // 1D Riemann problems perpendicular to each fan edge.
    std::vector<Rp1D> rp(n);
    std::vector<Vec2> tau(n);
    double lamMax = 1e-300;
    for (int j = 0; j < n; ++j) {
        tau[j] = rot90ccw(eta[j]);
        rp[j] = solveRp(phys_, q[(j + n - 1) % n], q[j], tau[j]);
        lamMax = std::max(lamMax, phys_.maxAbsEigenvalue(q[j]));
    }

    // Edge-aligned speeds: the interaction front along eta_j is set by the
    // waves of the two neighboring edge problems projected onto eta_j.
    // These tight values make the straight-interface fan reduce exactly to
    // the 1D solver.
    std::vector<double> S(n);
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        S[j] = std::max(rp[jm].sR * tau[jm].dot(eta[j]),
                        rp[jp].sL * tau[jp].dot(eta[j]));
        S[j] = std::max(S[j], 1e-10 * lamMax);
    }

    NodeSolution sol;
    sol.hllcWeight = std::clamp(hllcWeight, 0.0, 1.0);
    std::vector<Vec2> P;
    std::vector<double> len;
    double area = 0.0;
    std::vector<double> d(n);
    bool rusanovized = false;
    for (int attempt = 0;; ++attempt) {
        for (int j = 0; j < n; ++j) d[j] = S[j] * dt;
        if (buildPolygon(eta, d, P, len, area)) break;
        if (rusanovized)
            throw SolverError(SolverError::Kind::Geometry,
                              "vertex wave-model polygon is degenerate");
        // Inconsistent speeds: rebuild with one isotropic speed.
        for (int j = 0; j < n; ++j) S[j] = lamMax;
        rusanovized = true;
    }

    // Interacting state from conservation over the space-time prism: the
    // polygon grows self-similarly from the vertex, each side panel carries
    // the sub-fan of its edge problem, and the panel flux density in the
    // outward direction (eta_j, -S_j) is F.eta_j - S_j q.
    auto panelAccumulate = [&](auto&& contribute, bool contactPanels) {
        for (int j = 0; j < n; ++j) {
            int jm = (j + n - 1) % n;
            double c0 = P[jm].dot(tau[j]), c1 = P[j].dot(tau[j]);
            if (!(c1 > c0)) continue;
            const Rp1D& r = rp[j];
            std::vector<std::pair<double, const State*>> cuts;
            const State& qa = q[(j + n - 1) % n];
            const State& qb = q[j];
            if (contactPanels && r.hasContact) {
                cuts = {{r.sL * dt, &qa},
                        {r.sStar * dt, &r.starL},
                        {r.sR * dt, &r.starR}};
            } else {
                cuts = {{r.sL * dt, &qa}, {r.sR * dt, &r.hllStar}};
            }
            std::vector<double> edges = {c0};
            std::vector<const State*> states;
            for (auto& [pos, st] : cuts) {
                edges.push_back(std::clamp(pos, c0, c1));
                states.push_back(st);
            }
            edges.push_back(c1);
            states.push_back(&qb);
            for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
                double a = edges[k], b = std::max(edges[k + 1], edges[k]);
                if (!(b > a)) continue;
                contribute(j, a, b, *states[k]);
            }
        }
    };

    const int nv = phys_.numVars();
    auto solveHllState = [&]() {
        State acc = State::Zero(nv);
        panelAccumulate(
            [&](int j, double a, double b, const State& s) {
                acc += (b - a) * (phys_.fluxNormal(s, eta[j]) - S[j] * s);
            },
            false);
        return State((-dt * acc / (2.0 * area)).eval());
    };

    sol.qStar = solveHllState();
    for (int round = 0; round < 3 && !phys_.admissible(sol.qStar); ++round) {
        for (double& s : S) s *= 1.5;
        for (int j = 0; j < n; ++j) d[j] = S[j] * dt;
        if (!buildPolygon(eta, d, P, len, area)) break;
        sol.qStar = solveHllState();
        sol.inflations = round + 1;
    }
    if (!phys_.admissible(sol.qStar)) {
        NodeSolution fb = fallbackSolution(q);
        fb.speeds = S;
        fb.polygon = P;
        fb.area = area;
        fb.hllcWeight = sol.hllcWeight;
        fb.inflations = sol.inflations;
        return fb;
    }
    sol.qC1 = sol.qStar;
    sol.qC2 = sol.qStar;
    sol.nodeVelocity = phys_.velocity(sol.qStar);
    sol.speeds = S;
    sol.polygon = P;
    sol.area = area;

    if (sol.hllcWeight <= 0.0) return sol;

    // Contact split: the plane through the vertex moving with the
    // interacting state's velocity divides the polygon in two; conservation
    // on each piece with contact-resolving side panels yields the substates.
    Vec2 vstar = sol.nodeVelocity;
    double Sc = vstar.norm();
    if (!(Sc > 1e-12 * lamMax)) return sol;
    Vec2 m = vstar / Sc;
    double dc = Sc * dt;

    // Chord of the contact line x.m = dc inside the polygon, and the area
    // of the trailing piece {x.m <= dc}.
    std::vector<Vec2> poly1;
    std::vector<Vec2> chordPts;
    for (int j = 0; j < n; ++j) {
        Vec2 a = P[(j + n - 1) % n], b = P[j];
        double fa = a.dot(m) - dc, fb = b.dot(m) - dc;
        if (fa <= 0.0) poly1.push_back(a);
        if ((fa < 0.0) != (fb < 0.0)) {
            Vec2 x = a + (fa / (fa - fb)) * (b - a);
            poly1.push_back(x);
            chordPts.push_back(x);
        }
    }
    if (chordPts.size() != 2) return sol;
    double Lc = (chordPts[1] - chordPts[0]).norm();
    double A1 = 0.0;
    for (std::size_t k = 0; k < poly1.size(); ++k) {
        const Vec2& a = poly1[k];
        const Vec2& b = poly1[(k + 1) % poly1.size()];
        A1 += 0.5 * cross2(a, b);
    }
    double A2 = area - A1;
    // A sliver sub-region has an ill-conditioned area average (the residual
    // terms no longer cancel against a vanishing area), so only split when
    // both pieces carry a meaningful share of the wave model.
    if (A1 < 0.05 * area || A2 < 0.05 * area) return sol;

    State phiC = phys_.fluxNormal(sol.qStar, m) - Sc * sol.qStar;
    State acc1 = Lc * phiC, acc2 = (-Lc) * phiC;
    panelAccumulate(
        [&](int j, double a, double b, const State& s) {
            // Split the piece where the contact chord crosses the panel.
            double tm = tau[j].dot(m);
            double cInt = (std::abs(tm) > 1e-14)
                              ? (dc - d[j] * eta[j].dot(m)) / tm
                              : a - 1.0;
            auto emit = [&](double lo, double hi) {
                if (!(hi > lo)) return;
                double mid = 0.5 * (lo + hi);
                Vec2 x = d[j] * eta[j] + mid * tau[j];
                State piece = (hi - lo) * (phys_.fluxNormal(s, eta[j]) - S[j] * s);
                if (x.dot(m) <= dc)
                    acc1 += piece;
                else
                    acc2 += piece;
            };
            if (cInt > a && cInt < b) {
                emit(a, cInt);
                emit(cInt, b);
            } else {
                emit(a, b);
            }
        },
        true);
    State qC1 = -dt * acc1 / (2.0 * A1);
    State qC2 = -dt * acc2 / (2.0 * A2);
    if (!phys_.admissible(qC1) || !phys_.admissible(qC2)) return sol;
    sol.qC1 = qC1;
    sol.qC2 = qC2;
    sol.contactNormal = m;
    sol.contactSpeed = Sc;
    sol.split = true;
    return sol;
}

State NodeSolver::vertexFlux(const NodeSolution& sol, const Vec3& ntilde,
                             const Vec2& edgeDir) const {
    Vec2 nsp(ntilde.x(), ntilde.y());
    auto spaceTimeFlux = [&](const State& s) {
        return State(phys_.fluxNormal(s, nsp) + ntilde.z() * s);
    };
    State G = spaceTimeFlux(sol.qStar);
    if (sol.split && sol.hllcWeight > 0.0 && edgeDir.squaredNorm() > 0.0) {
        const State& sub =
            (edgeDir.dot(sol.contactNormal) > 0.0) ? sol.qC2 : sol.qC1;
        G = (1.0 - sol.hllcWeight) * G + sol.hllcWeight * spaceTimeFlux(sub);
    }
    return G;
}

double compressionSensor(const Physics& phys, const std::vector<Vec2>& eta,
                         const std::vector<State>& q, double lo, double hi) {
    const int n = static_cast<int>(eta.size());
    double chi = 0.0;
    for (int j = 0; j < n; ++j) {
        const State& ql = q[(j + n - 1) % n];
        const State& qr = q[j];
        Vec2 tau = rot90ccw(eta[j]);
        double dv = (phys.velocity(ql) - phys.velocity(qr)).dot(tau);
        double cbar = 0.5 * (phys.soundSpeed(ql) + phys.soundSpeed(qr));
        if (cbar > 0.0) chi = std::max(chi, dv / cbar);
    }
    return std::clamp((chi - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace alefv
