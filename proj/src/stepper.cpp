#include "alefv/stepper.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "alefv/basis.hpp"

namespace alefv {

namespace {

const Vec2 kRefCorner[3] = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

inline double cross2(const Vec2& a, const Vec2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

Stepper::Stepper(TriMesh mesh, const Physics& phys, StepperParams params)
    : mesh_(std::move(mesh)),
      phys_(phys),
      params_(std::move(params)),
      weno_(mesh_, params_.degree, params_.weno),
      pred_(params_.degree, phys_),
      node_(phys_) {
    Q_.resize(mesh_.numElements(), phys_.numVars());
    Q_.setZero();
    vertexBoundaryFaces_.resize(mesh_.numVertices());
    for (std::size_t f = 0; f < mesh_.faces.size(); ++f) {
        const TriMesh::Face& fc = mesh_.faces[f];
        if (fc.tj >= 0) continue;
        vertexBoundaryFaces_[mesh_.tri[fc.ti][fc.ei]].push_back(static_cast<int>(f));
        vertexBoundaryFaces_[mesh_.tri[fc.ti][(fc.ei + 1) % 3]].push_back(
            static_cast<int>(f));
    }
}

void Stepper::setInitialCondition(const std::function<State(const Vec2&)>& f,
                                  int quadDegree) {
    const TriQuadRule& rule = triangleQuadrature(quadDegree);
    for (int i = 0; i < mesh_.numElements(); ++i) {
        ReferenceMap map = mesh_.refMap(i);
        State avg = State::Zero(phys_.numVars());
        for (std::size_t q = 0; q < rule.points.size(); ++q)
            avg += rule.weights[q] * f(map.toPhys(rule.points[q]));
        Q_.row(i) = (2.0 * avg).transpose();  // reference weights sum to 1/2
    }
}

State Stepper::totalConserved() const {
    State tot = State::Zero(phys_.numVars());
    for (int i = 0; i < mesh_.numElements(); ++i)
        tot += mesh_.volume(i) * State(Q_.row(i).transpose());
    return tot;
}

double Stepper::computeTimestep() const {
    // Prescribed wall velocities do not appear in the cell states, so cells
    // touching a moving wall get the wall speed added to their signal speed.
    std::vector<double> wallSpeed(mesh_.numElements(), 0.0);
    for (const TriMesh::Face& fc : mesh_.faces) {
        if (fc.tj >= 0) continue;
        const BoundaryCondition& bc = boundaryFor(fc.tag);
        if (bc.kind != BoundaryCondition::Kind::MovingWall || !bc.wallVelocity)
            continue;
        Vec2 mid = 0.5 * (mesh_.vertex[mesh_.tri[fc.ti][fc.ei]] +
                          mesh_.vertex[mesh_.tri[fc.ti][(fc.ei + 1) % 3]]);
        wallSpeed[fc.ti] = std::max(wallSpeed[fc.ti],
                                    bc.wallVelocity(mid, mesh_.time).norm());
    }
    double dt = 1e300;
    for (int i = 0; i < mesh_.numElements(); ++i) {
        State q = Q_.row(i).transpose();
        phys_.requireAdmissible(q);
        double lam = phys_.maxAbsEigenvalue(q) + wallSpeed[i];
        if (params_.velocityOverride)
            lam += params_.velocityOverride(mesh_.centroid(i), mesh_.time).norm();
        dt = std::min(dt, mesh_.incircleDiameter(i) / std::max(lam, 1e-300));
    }
    return params_.cfl * dt;
}

const BoundaryCondition& Stepper::boundaryFor(int tag) const {
    auto it = bcs_.find(tag);
    return it == bcs_.end() ? defaultBc_ : it->second;
}

State Stepper::ghostState(const State& inner, const BoundaryCondition& bc,
                          const Vec3& normal, const Vec2& x, double t) const {
    using Kind = BoundaryCondition::Kind;
    if (bc.kind == Kind::Transmissive) return inner;
    if (bc.kind == Kind::Dirichlet) return bc.state(x, t);
    Vec2 n = Vec2(normal.x(), normal.y()).normalized();
    Vec2 w = Vec2::Zero();
    if (bc.kind == Kind::MovingWall && bc.wallVelocity) w = bc.wallVelocity(x, t);
    State prim = phys_.toPrimitive(inner);
    Vec2 v(prim(1), prim(2));
    if (bc.kind == Kind::NoSlipWall)
        v = 2.0 * w - v;
    else
        v = v - 2.0 * ((v - w).dot(n)) * n;
    prim(1) = v.x();
    prim(2) = v.y();
    if (phys_.kind() == SystemKind::Mhd) {
        // B is axial: tangential component flips under the mirror.
        Vec2 B(prim(4), prim(5));
        Vec2 Bg = 2.0 * B.dot(n) * n - B;
        prim(4) = Bg.x();
        prim(5) = Bg.y();
    }
    return phys_.fromPrimitive(prim);
}

void Stepper::solvePredictors(double dt, std::vector<Predictor::Result>& preds,
                              StepReport& rep) const {
    const int ne = mesh_.numElements();
    std::vector<RecCoeffs> coeffs;
    Eigen::MatrixXd avgByVar = Q_.transpose();  // reconstructor wants nvars x NE
    weno_.reconstruct(mesh_, avgByVar, coeffs);
    const VelocityField* vo =
        params_.velocityOverride ? &params_.velocityOverride : nullptr;
    preds.resize(ne);
    for (int i = 0; i < ne; ++i) {
        ReferenceMap geom = mesh_.refMap(i);
        try {
            preds[i] = pred_.evolve(geom, weno_.basis(), coeffs[i], dt,
                                    params_.motion, vo, mesh_.time);
        } catch (const SolverError&) {
            // Retry from the robust constant reconstruction.
            RecCoeffs wc = RecCoeffs::Zero(coeffs[i].rows(), coeffs[i].cols());
            wc.row(0) = Q_.row(i);
            preds[i] = pred_.evolve(geom, weno_.basis(), wc, dt, params_.motion,
                                    vo, mesh_.time);
            ++rep.predictorFallbacks;
        }
    }
}

Vec2 Stepper::boundaryVelocity(int k, const Vec2& vGuess, double dt) const {
    using Kind = BoundaryCondition::Kind;
    const Vec2& x = mesh_.vertex[k];
    Vec2 v = vGuess;
    bool haveTangent = false;
    Vec2 tangent = Vec2::Zero();
    bool pinned = false;
    // For a prescribed velocity field the vertex should follow its trajectory
    // y' = v(y, t) over the step; a single midpoint sample is only first-order
    // along strongly accelerating trajectories. Integrate with RK4 and return
    // the average velocity (y(t+dt) - x) / dt.
    auto follow = [&](const std::function<Vec2(const Vec2&, double)>& vel) {
        Vec2 y = x;
        double t = mesh_.time;
        const int nsub = 2;
        const double h = dt / nsub;
        for (int s = 0; s < nsub; ++s) {
            Vec2 k1 = vel(y, t);
            Vec2 k2 = vel(y + 0.5 * h * k1, t + 0.5 * h);
            Vec2 k3 = vel(y + 0.5 * h * k2, t + 0.5 * h);
            Vec2 k4 = vel(y + h * k3, t + h);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        return Vec2((y - x) / std::max(dt, 1e-300));
    };
    for (int f : vertexBoundaryFaces_[k]) {
        const TriMesh::Face& fc = mesh_.faces[f];
        const BoundaryCondition& bc = boundaryFor(fc.tag);
        switch (bc.kind) {
            case Kind::Dirichlet:
                return follow([&](const Vec2& y, double t) {
                    State prim = phys_.toPrimitive(bc.state(y, t));
                    return Vec2(prim(1), prim(2));
                });
            case Kind::MovingWall:
                return bc.wallVelocity ? follow(bc.wallVelocity) : Vec2::Zero();
            case Kind::NoSlipWall:
                pinned = true;
                break;
            case Kind::SlipWall: {
                // Accumulate the chord across the vertex instead of using a
                // single face tangent: projecting onto a local face tangent
                // feeds a vertex's own position error back into its velocity,
                // which is unstable on straight walls. The chord (sum of the
                // sign-aligned edge vectors) is independent of this vertex.
                Vec2 e = mesh_.edgeVector(fc.ti, fc.ei);
                if (haveTangent) {
                    if (tangent.dot(e) < 0.0) e = -e;
                    double sinAngle = std::abs(cross2(tangent.normalized(),
                                                      e.normalized()));
                    if (sinAngle > 1e-6) pinned = true;  // genuine wall corner
                    tangent += e;
                } else {
                    tangent = e;
                    haveTangent = true;
                }
                break;
            }
            case Kind::Transmissive:
                break;
        }
    }
    if (pinned) return Vec2::Zero();
    if (haveTangent) {
        tangent.normalize();
        return tangent * v.dot(tangent);
    }
    return v;
}

bool Stepper::mirroredWallNodeVelocity(int k, double dt,
                                       const std::vector<Predictor::Result>& preds,
                                       Vec2& vOut) const {
    // Close an open fan on a straight slip wall with mirror-ghost sectors and
    // run the multidimensional node solver, so a wall vertex responds to the
    // actual wave dynamics (a mass-weighted average of the fan states lags a
    // strong compression and lets the wall overtake the vertex).
    using Kind = BoundaryCondition::Kind;
    if (vertexBoundaryFaces_[k].empty()) return false;
    for (int f : vertexBoundaryFaces_[k])
        if (boundaryFor(mesh_.faces[f].tag).kind != Kind::SlipWall) return false;

    const TriMesh::Fan& fan = mesh_.fans[k];
    const int m = static_cast<int>(fan.tris.size());
    if (m < 1) return false;
    std::vector<Vec2> rays(m + 1);
    for (int j = 0; j <= m; ++j) {
        int t = fan.tris[std::min(j, m - 1)];
        int c = fan.corners[std::min(j, m - 1)];
        int other = j < m ? (c + 1) % 3 : (c + 2) % 3;
        Vec2 d = mesh_.cornerPosAround(t, other, c) - mesh_.vertex[k];
        double len = d.norm();
        if (!(len > 0.0)) return false;
        rays[j] = d / len;
    }
    // Only straight walls: the two boundary rays must be anti-parallel.
    if (rays[0].dot(rays[m]) >= 0.0 ||
        std::abs(cross2(rays[0], rays[m])) > 1e-3)
        return false;

    Vec2 tdir = (rays[0] - rays[m]).normalized();
    Vec2 n(-tdir.y(), tdir.x());
    Vec3 n3(n.x(), n.y(), 0.0);
    BoundaryCondition slip;
    slip.kind = Kind::SlipWall;
    std::vector<Vec2> eta(2 * m);
    for (int j = 0; j <= m; ++j) eta[j % (2 * m)] = rays[j];
    for (int i = 1; i < m; ++i)
        eta[m + i] = rays[m - i] - 2.0 * rays[m - i].dot(n) * n;

    QuadRule1D gl = gaussLegendre01(2);
    try {
        Vec2 v = Vec2::Zero();
        for (std::size_t g = 0; g < gl.points.size(); ++g) {
            std::vector<State> q(2 * m);
            for (int j = 0; j < m; ++j) {
                const Vec2& rc = kRefCorner[fan.corners[j]];
                q[j] = pred_.evalState(preds[fan.tris[j]], rc.x(), rc.y(),
                                       gl.points[g]);
            }
            double tg = mesh_.time + gl.points[g] * dt;
            for (int j = 0; j < m; ++j)
                q[m + j] = ghostState(q[m - 1 - j], slip, n3, mesh_.vertex[k], tg);
            double w = 1.0;
            if (params_.nodeFlux == NodeFluxKind::Hll)
                w = 0.0;
            else if (params_.nodeFlux == NodeFluxKind::Blend)
                w = 1.0 - compressionSensor(phys_, eta, q, params_.sensorLo,
                                            params_.sensorHi);
            NodeSolution sol = node_.solve(eta, q, dt, w);
            if (sol.fallback) return false;
            v += gl.weights[g] * sol.nodeVelocity;
        }
        vOut = v;
        return true;
    } catch (const SolverError&) {
        return false;
    }
}

void Stepper::solveNodes(double dt, const std::vector<Predictor::Result>& preds,
                         std::vector<std::vector<NodeSolution>>& sols,
                         std::vector<char>& nodeOk, std::vector<Vec2>& vbar,
                         StepReport& rep) const {
    const int nvtx = mesh_.numVertices();
    QuadRule1D gl = gaussLegendre01(2);
    sols.assign(nvtx, {});
    nodeOk.assign(nvtx, 0);
    vbar.assign(nvtx, Vec2::Zero());

    for (int k = 0; k < nvtx; ++k) {
        const TriMesh::Fan& fan = mesh_.fans[k];

        if (params_.velocityOverride) {
            Vec2 v = Vec2::Zero();
            for (std::size_t g = 0; g < gl.points.size(); ++g)
                v += gl.weights[g] * params_.velocityOverride(
                                         mesh_.vertex[k],
                                         mesh_.time + gl.points[g] * dt);
            vbar[k] = v;
        }

        // Multidimensional node solutions (interior vertices only).
        if (params_.fluxMode == FluxMode::MultiD && fan.closed) {
            const int m = static_cast<int>(fan.tris.size());
            std::vector<Vec2> eta(m);
            bool geomOk = true;
            for (int j = 0; j < m; ++j) {
                int t = fan.tris[j], c = fan.corners[j];
                Vec2 d = mesh_.cornerPosAround(t, (c + 1) % 3, c) - mesh_.vertex[k];
                double len = d.norm();
                if (!(len > 0.0)) {
                    geomOk = false;
                    break;
                }
                eta[j] = d / len;
            }
            if (geomOk) {
                try {
                    std::vector<NodeSolution> nodeSols;
                    Vec2 v = Vec2::Zero();
                    bool clean = true;
                    for (std::size_t g = 0; g < gl.points.size(); ++g) {
                        std::vector<State> q(m);
                        for (int j = 0; j < m; ++j) {
                            const Vec2& rc = kRefCorner[fan.corners[j]];
                            q[j] = pred_.evalState(preds[fan.tris[j]], rc.x(),
                                                   rc.y(), gl.points[g]);
                        }
                        double w = 1.0;
                        if (params_.nodeFlux == NodeFluxKind::Hll)
                            w = 0.0;
                        else if (params_.nodeFlux == NodeFluxKind::Blend)
                            w = 1.0 - compressionSensor(phys_, eta, q,
                                                        params_.sensorLo,
                                                        params_.sensorHi);
                        NodeSolution sol = node_.solve(eta, q, dt, w);
                        clean = clean && !sol.fallback;
                        v += gl.weights[g] * sol.nodeVelocity;
                        nodeSols.push_back(std::move(sol));
                    }
                    sols[k] = std::move(nodeSols);
                    nodeOk[k] = clean ? 1 : 0;
                    if (!clean) ++rep.nodeFallbacks;
                    if (clean && !params_.velocityOverride &&
                        params_.motion == MeshMotionMode::Lagrangian)
                        vbar[k] = v;
                } catch (const SolverError&) {
                    sols[k].clear();
                    nodeOk[k] = 0;
                    ++rep.nodeFallbacks;
                }
            }
        }

        if (params_.velocityOverride) continue;
        if (params_.motion == MeshMotionMode::Eulerian) continue;

        if (!nodeOk[k]) {
            if (!fan.closed && params_.fluxMode == FluxMode::MultiD &&
                mirroredWallNodeVelocity(k, dt, preds, vbar[k])) {
                vbar[k] = boundaryVelocity(k, vbar[k], dt);
                continue;
            }
            std::vector<Vec2> vels;
            std::vector<double> mass;
            if (fan.closed) {
                // Fallback after a failed node solve: robust mass-weighted
                // average of the fan cell averages.
                for (std::size_t j = 0; j < fan.tris.size(); ++j) {
                    int t = fan.tris[j];
                    State q = Q_.row(t).transpose();
                    vels.push_back(phys_.velocity(q));
                    mass.push_back(q(0) * mesh_.volume(t));
                }
            } else {
                // Boundary fan: point values of the predictors at the
                // vertex.  Cell averages carry an O(h) radial bias that
                // makes boundary rings steadily lag a strong compression
                // until they are crushed between wall and interior.
                for (std::size_t j = 0; j < fan.tris.size(); ++j) {
                    int t = fan.tris[j];
                    const Vec2& rc = kRefCorner[fan.corners[j]];
                    State q = State::Zero(phys_.numVars());
                    for (std::size_t g = 0; g < gl.points.size(); ++g)
                        q += gl.weights[g] *
                             pred_.evalState(preds[t], rc.x(), rc.y(),
                                             gl.points[g]);
                    vels.push_back(phys_.velocity(q));
                    mass.push_back(q(0) * mesh_.volume(t));
                }
            }
            vbar[k] = nodeVelocityAverage(vels, mass);
        }
        if (!fan.closed) vbar[k] = boundaryVelocity(k, vbar[k], dt);
    }
}

std::vector<Vec2> Stepper::moveVertices(double dt, const std::vector<Vec2>& vbar,
                                        StepReport& rep) const {
    const int nvtx = mesh_.numVertices();
    const int ne = mesh_.numElements();
    std::vector<Vec2> xLag(nvtx);
    for (int k = 0; k < nvtx; ++k) xLag[k] = mesh_.vertex[k] + dt * vbar[k];

    auto posAt = [&](const std::vector<Vec2>& X, int t, int c) {
        Vec2 x = X[mesh_.tri[t][c]];
        return mesh_.periodic ? Vec2(x + mesh_.shift[t][c]) : x;
    };
    auto areaAt = [&](const std::vector<Vec2>& X, int t) {
        Vec2 a = posAt(X, t, 0), b = posAt(X, t, 1), c = posAt(X, t, 2);
        return 0.5 * cross2(b - a, c - a);
    };

    bool doRezone = params_.rezone;
    if (!doRezone && params_.motion == MeshMotionMode::Lagrangian) {
        for (int t = 0; t < ne && !doRezone; ++t)
            if (areaAt(xLag, t) < params_.areaDropTrigger * mesh_.volume(t))
                doRezone = true;
    }

    std::vector<Vec2> xNew = xLag;
    if (doRezone) {
        for (int k = 0; k < nvtx; ++k) {
            const TriMesh::Fan& fan = mesh_.fans[k];
            if (!fan.closed) continue;  // boundary vertices stay Lagrangian
            std::vector<std::pair<Vec2, Vec2>> opp;
            std::vector<Mat2> defs;
            bool ok = true;
            for (std::size_t j = 0; j < fan.tris.size(); ++j) {
                int t = fan.tris[j], c = fan.corners[j];
                Vec2 off = mesh_.periodic ? Vec2(-mesh_.shift[t][c]) : Vec2::Zero();
                opp.emplace_back(posAt(xLag, t, (c + 1) % 3) + off,
                                 posAt(xLag, t, (c + 2) % 3) + off);
                Mat2 J0, J1;
                Vec2 a0 = mesh_.cornerPos(t, 0);
                J0 << mesh_.cornerPos(t, 1) - a0, mesh_.cornerPos(t, 2) - a0;
                Vec2 a1 = posAt(xLag, t, 0);
                J1 << posAt(xLag, t, 1) - a1, posAt(xLag, t, 2) - a1;
                if (!(std::abs(J0.determinant()) > 0.0)) {
                    ok = false;
                    break;
                }
                defs.push_back(J1 * J0.inverse());
            }
            if (!ok) continue;
            try {
                Vec2 xr = rezoneVertex(xLag[k], opp);
                double omega = computeOmega(defs, params_.omegaBeta);
                Vec2 xf = relaxVertex(xLag[k], xr, omega);
                if ((xf - xLag[k]).norm() > 0.0) ++rep.rezonedVertices;
                xNew[k] = xf;
            } catch (const SolverError&) {
                // keep the Lagrangian position
            }
        }
    }

    for (int t = 0; t < ne; ++t)
        if (!(areaAt(xNew, t) > 0.0))
            throw SolverError(SolverError::Kind::Geometry,
                              fmt::format("element {} tangles during mesh motion", t));
    return xNew;
}

StepReport Stepper::attempt(double dt) {
    StepReport rep;
    rep.dt = dt;
    rep.totalBefore = totalConserved();
    const int ne = mesh_.numElements();
    const int nv = phys_.numVars();
    QuadRule1D gl = gaussLegendre01(2);

    std::vector<Predictor::Result> preds;
    solvePredictors(dt, preds, rep);

    std::vector<std::vector<NodeSolution>> sols;
    std::vector<char> nodeOk;
    std::vector<Vec2> vbar;
    solveNodes(dt, preds, sols, nodeOk, vbar, rep);

    std::vector<Vec2> xNew = moveVertices(dt, vbar, rep);
    auto posNew = [&](int t, int c) {
        Vec2 x = xNew[mesh_.tri[t][c]];
        return mesh_.periodic ? Vec2(x + mesh_.shift[t][c]) : x;
    };

    std::vector<double> oldVol(ne), newVol(ne);
    for (int t = 0; t < ne; ++t) {
        oldVol[t] = mesh_.volume(t);
        Vec2 a = posNew(t, 0), b = posNew(t, 1), c = posNew(t, 2);
        newVol[t] = 0.5 * cross2(b - a, c - a);
    }

    auto edge1d = [&](const State& qm, const State& qp, const Vec3& N) {
        return params_.edgeSolver == EdgeSolverKind::Hll
                   ? hll1dAle(phys_, qm, qp, N)
                   : hllc1dAle(phys_, qm, qp, N);
    };
    auto rusanov = [&](const State& qm, const State& qp, const Vec3& N) {
        Vec2 nsp(N.x(), N.y());
        double nlen = nsp.norm();
        Vec2 nhat = nsp / nlen;
        double Vn = -N.z() / nlen;
        double s = std::max(phys_.signalSpeed(qm, nhat) +
                                std::abs(phys_.velocity(qm).dot(nhat) - Vn),
                            phys_.signalSpeed(qp, nhat) +
                                std::abs(phys_.velocity(qp).dot(nhat) - Vn));
        State fm = phys_.fluxNormal(qm, nsp) + N.z() * qm;
        State fp = phys_.fluxNormal(qp, nsp) + N.z() * qp;
        return State(0.5 * (fm + fp) - 0.5 * s * nlen * (qp - qm));
    };

    const int nf = static_cast<int>(mesh_.faces.size());
    Eigen::MatrixXd faceFlux = Eigen::MatrixXd::Zero(nf, nv);
    std::vector<char> faceFirstOrder(nf, 0);
    const double wChi[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
    const double chiPts[3] = {0.0, 0.5, 1.0};

    // Integrates one face with first-order Rusanov fluxes from the cell
    // averages (rescue path).
    auto firstOrderFace = [&](int f) {
        const TriMesh::Face& fc = mesh_.faces[f];
        Vec2 a0 = mesh_.cornerPos(fc.ti, fc.ei);
        Vec2 b0 = mesh_.cornerPos(fc.ti, (fc.ei + 1) % 3);
        Vec2 a1 = posNew(fc.ti, fc.ei);
        Vec2 b1 = posNew(fc.ti, (fc.ei + 1) % 3);
        State qm = Q_.row(fc.ti).transpose();
        State acc = State::Zero(nv);
        for (std::size_t g = 0; g < gl.points.size(); ++g) {
            double tau = gl.points[g];
            for (int p = 0; p < 3; ++p) {
                double chi = chiPts[p];
                Vec2 Xchi = (b0 - a0) * (1.0 - tau) + (b1 - a1) * tau;
                Vec2 Xtau = (a1 - a0) * (1.0 - chi) + (b1 - b0) * chi;
                Vec3 N(dt * Xchi.y(), -dt * Xchi.x(), cross2(Xchi, Xtau));
                State qp;
                if (fc.tj >= 0) {
                    qp = Q_.row(fc.tj).transpose();
                } else {
                    Vec2 x = a0 + chi * (b0 - a0) + tau * (a1 - a0 + chi * ((b1 - b0) - (a1 - a0)));
                    qp = ghostState(qm, boundaryFor(fc.tag), N, x,
                                    mesh_.time + tau * dt);
                }
                acc += gl.weights[g] * wChi[p] * rusanov(qm, qp, N);
            }
        }
        faceFlux.row(f) = acc.transpose();
        faceFirstOrder[f] = 1;
    };

    for (int f = 0; f < nf; ++f) {
        const TriMesh::Face& fc = mesh_.faces[f];
        int va = mesh_.tri[fc.ti][fc.ei];
        int vb = mesh_.tri[fc.ti][(fc.ei + 1) % 3];
        Vec2 a0 = mesh_.cornerPos(fc.ti, fc.ei);
        Vec2 b0 = mesh_.cornerPos(fc.ti, (fc.ei + 1) % 3);
        Vec2 a1 = posNew(fc.ti, fc.ei);
        Vec2 b1 = posNew(fc.ti, (fc.ei + 1) % 3);
        Vec2 refM0 = kRefCorner[fc.ei], refM1 = kRefCorner[(fc.ei + 1) % 3];
        Vec2 refP0, refP1;
        if (fc.tj >= 0) {
            refP0 = kRefCorner[(fc.ej + 1) % 3];
            refP1 = kRefCorner[fc.ej];
        }
        State acc = State::Zero(nv);
        bool failed = false;
        for (std::size_t g = 0; g < gl.points.size() && !failed; ++g) {
            double tau = gl.points[g];
            for (int p = 0; p < 3 && !failed; ++p) {
                double chi = chiPts[p];
                Vec2 Xchi = (b0 - a0) * (1.0 - tau) + (b1 - a1) * tau;
                Vec2 Xtau = (a1 - a0) * (1.0 - chi) + (b1 - b0) * chi;
                Vec3 N(dt * Xchi.y(), -dt * Xchi.x(), cross2(Xchi, Xtau));
                try {
                    Vec2 rm = refM0 + chi * (refM1 - refM0);
                    State qm =
                        pred_.evalState(preds[fc.ti], rm.x(), rm.y(), tau);
                    State val;
                    int vtx = (p == 0) ? va : (p == 2) ? vb : -1;
                    bool useNode = fc.tj >= 0 && vtx >= 0 && nodeOk[vtx] &&
                                   !sols[vtx].empty();
                    if (useNode) {
                        Vec2 d = (p == 0) ? (b0 - a0) : (a0 - b0);
                        val = node_.vertexFlux(sols[vtx][g], N, d);
                    } else {
                        State qp;
                        if (fc.tj >= 0) {
                            Vec2 rp = refP0 + chi * (refP1 - refP0);
                            qp = pred_.evalState(preds[fc.tj], rp.x(), rp.y(),
                                                 tau);
                        } else {
                            Vec2 x = (1 - chi) * (1 - tau) * a0 +
                                     chi * (1 - tau) * b0 + (1 - chi) * tau * a1 +
                                     chi * tau * b1;
                            qp = ghostState(qm, boundaryFor(fc.tag), N, x,
                                            mesh_.time + tau * dt);
                        }
                        val = edge1d(qm, qp, N);
                    }
                    acc += gl.weights[g] * wChi[p] * val;
                } catch (const SolverError&) {
                    failed = true;
                }
            }
        }
        if (failed) {
            firstOrderFace(f);
            ++rep.rescuedFaces;
        } else {
            faceFlux.row(f) = acc.transpose();
        }
    }

    auto updateAll = [&](Eigen::MatrixXd& out) {
        out = Q_;
        for (int t = 0; t < ne; ++t) out.row(t) *= oldVol[t];
        for (int f = 0; f < nf; ++f) {
            const TriMesh::Face& fc = mesh_.faces[f];
            out.row(fc.ti) -= faceFlux.row(f);
            if (fc.tj >= 0) out.row(fc.tj) += faceFlux.row(f);
        }
        for (int t = 0; t < ne; ++t) out.row(t) /= newVol[t];
    };

    Eigen::MatrixXd qNew;
    updateAll(qNew);

    // Positivity rescue: any inadmissible element redoes all its faces with
    // first-order fluxes (both sharers are recomputed, preserving
    // conservation), then the update is repeated.
    for (int round = 0; round < 2; ++round) {
        bool bad = false, changed = false;
        for (int t = 0; t < ne; ++t) {
            State q = qNew.row(t).transpose();
            if (phys_.admissible(q)) continue;
            bad = true;
            for (int e = 0; e < 3; ++e) {
                int f = mesh_.faceOfEdge[t][e];
                if (faceFirstOrder[f]) continue;
                firstOrderFace(f);
                ++rep.rescuedFaces;
                changed = true;
            }
        }
        if (!bad) break;
        if (!changed)
            throw SolverError(SolverError::Kind::Admissibility,
                              "inadmissible update survives first-order rescue");
        updateAll(qNew);
    }
    for (int t = 0; t < ne; ++t) {
        State q = qNew.row(t).transpose();
        if (!phys_.admissible(q))
            throw SolverError(
                SolverError::Kind::Admissibility,
                fmt::format("element {} inadmissible after rescue", t));
    }

    // Commit.
    mesh_.vertex = xNew;
    mesh_.time += dt;
    Q_ = qNew;
    rep.totalAfter = totalConserved();
    rep.minArea = 1e300;
    for (int t = 0; t < ne; ++t) rep.minArea = std::min(rep.minArea, newVol[t]);
    return rep;
}

StepReport Stepper::step() { return step(computeTimestep()); }

StepReport Stepper::step(double dt) {
    int retries = 0;
    for (;;) {
        try {
            StepReport rep = attempt(dt);
            rep.dtRetries = retries;
            return rep;
        } catch (const SolverError& e) {
            if (e.kind() == SolverError::Kind::Config ||
                e.kind() == SolverError::Kind::Io || retries >= params_.maxDtRetries)
                throw;
            dt *= 0.5;
            ++retries;
        }
    }
}

}  // namespace alefv
