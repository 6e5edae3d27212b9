#include "alefv/predictor.hpp"

#include <cmath>

#include <fmt/format.h>

namespace alefv {

Predictor::Predictor(int degree, const Physics& phys, double tol)
    : degree_(degree), phys_(phys), tol_(tol), st_(degree) {}

Eigen::MatrixXd Predictor::computeP(const Eigen::MatrixXd& q, const Eigen::MatrixXd& x,
                                    double dt) const {
    const int ns = st_.spatialSize();
    const int nt = st_.levels();
    const int nv = static_cast<int>(q.cols());
    const Eigen::MatrixXd& Dxi = st_.spatial().dXiAtNodes();
    const Eigen::MatrixXd& Deta = st_.spatial().dEtaAtNodes();
    const Eigen::MatrixXd& Dt = st_.temporalDiff();

    if (ns == 1) return Eigen::MatrixXd::Zero(nt, nv);  // first order: w_h constant

    Eigen::MatrixXd P(nt * ns, nv);
    Eigen::MatrixXd f(ns, nv), g(ns, nv);
    State fs, gs;
    for (int m = 0; m < nt; ++m) {
        const auto qlev = q.middleRows(m * ns, ns);
        const auto xlev = x.middleRows(m * ns, ns);
        for (int s = 0; s < ns; ++s) {
            State qn = qlev.row(s).transpose();
            phys_.flux(qn, fs, gs);
            f.row(s) = fs.transpose();
            g.row(s) = gs.transpose();
        }
        Eigen::MatrixXd qxi = Dxi * qlev, qeta = Deta * qlev;
        Eigen::MatrixXd fxi = Dxi * f, feta = Deta * f;
        Eigen::MatrixXd gxi = Dxi * g, geta = Deta * g;
        Eigen::MatrixXd xxi = Dxi * xlev, xeta = Deta * xlev;
        for (int s = 0; s < ns; ++s) {
            Mat2 A;
            A << xxi(s, 0), xeta(s, 0), xxi(s, 1), xeta(s, 1);
            double det = A.determinant();
            double scale = A.cwiseAbs().maxCoeff();
            if (!(det > 1e-13 * scale * scale))
                throw SolverError(SolverError::Kind::Predictor,
                                  "collapsed element geometry in predictor");
            Mat2 Ainv = A.inverse();
            // x_tau via collocation across levels.
            Vec2 xtau = Vec2::Zero();
            for (int mp = 0; mp < nt; ++mp) {
                xtau.x() += Dt(m, mp) * x(mp * ns + s, 0);
                xtau.y() += Dt(m, mp) * x(mp * ns + s, 1);
            }
            Vec2 xit_etat = -(Ainv * xtau) / dt;
            for (int v = 0; v < nv; ++v) {
                P(m * ns + s, v) =
                    -(qxi(s, v) * xit_etat.x() + qeta(s, v) * xit_etat.y() +
                      fxi(s, v) * Ainv(0, 0) + feta(s, v) * Ainv(1, 0) +
                      gxi(s, v) * Ainv(0, 1) + geta(s, v) * Ainv(1, 1));
            }
        }
    }
    return P;
}

void Predictor::temporalSolve(Eigen::MatrixXd& out, const Eigen::MatrixXd& rate,
                              double dt) const {
    const int ns = st_.spatialSize();
    const int nt = st_.levels();
    if (nt == 1) return;
    const int nc = static_cast<int>(out.cols());
    const Eigen::MatrixXd& Kt = st_.Kt();
    const Eigen::MatrixXd& Mt = st_.Mt();
    Eigen::VectorXd rhs(nt - 1);
    for (int s = 0; s < ns; ++s) {
        for (int c = 0; c < nc; ++c) {
            for (int k = 1; k < nt; ++k) {
                double b = 0.0;
                for (int m = 0; m < nt; ++m) b += Mt(k, m) * rate(m * ns + s, c);
                rhs(k - 1) = dt * b - Kt(k, 0) * out(s, c);
            }
            Eigen::VectorXd sol = st_.KtInnerInv() * rhs;
            for (int k = 1; k < nt; ++k) out(k * ns + s, c) = sol(k - 1);
        }
    }
}

void Predictor::updateVelocities(Eigen::MatrixXd& V, const Eigen::MatrixXd& q,
                                 const Eigen::MatrixXd& x, double t0, double dt,
                                 MeshMotionMode mode,
                                 const VelocityField* vOverride) const {
    const int ns = st_.spatialSize();
    const int nt = st_.levels();
    if (vOverride) {
        for (int m = 0; m < nt; ++m)
            for (int s = 0; s < ns; ++s) {
                Vec2 xv = x.row(m * ns + s).transpose();
                V.row(m * ns + s) =
                    (*vOverride)(xv, t0 + st_.tauLevel(m) * dt).transpose();
            }
        return;
    }
    if (mode == MeshMotionMode::Eulerian) {
        V.setZero();
        return;
    }
    for (int l = 0; l < nt * ns; ++l) {
        double rho = q(l, 0);
        if (!(rho > 0.0))
            throw SolverError(SolverError::Kind::Admissibility,
                              "non-positive density in predictor");
        V(l, 0) = q(l, 1) / rho;
        V(l, 1) = q(l, 2) / rho;
    }
}

Predictor::Result Predictor::evolve(const ReferenceMap& geom, const DubinerBasis& recBasis,
                                    const RecCoeffs& w, double dt, MeshMotionMode mode,
                                    const VelocityField* vOverride, double t0) const {
    const int ns = st_.spatialSize();
    const int nt = st_.levels();
    const int nv = static_cast<int>(w.cols());

    Result r;
    r.dt = dt;
    r.t0 = t0;
    r.q.resize(nt * ns, nv);
    r.x.resize(nt * ns, 2);
    for (int s = 0; s < ns; ++s) {
        Vec2 node = st_.spatial().node(s);
        State qs = WenoReconstructor::evaluate(recBasis, w, node.x(), node.y());
        Vec2 xs = geom.toPhys(node);
        for (int m = 0; m < nt; ++m) {
            r.q.row(m * ns + s) = qs.transpose();
            r.x.row(m * ns + s) = xs.transpose();
        }
    }
    r.V.resize(nt * ns, 2);
    updateVelocities(r.V, r.q, r.x, t0, dt, mode, vOverride);

    // The fixed point gains one temporal order per sweep; the cap at twice
    // the theoretical count is a normal stop, not a failure.  Failure means
    // a diverging or non-finite iterate.
    const int cap = maxIterations();
    for (int iter = 1; iter <= cap; ++iter) {
        Eigen::MatrixXd xNew = r.x;
        temporalSolve(xNew, r.V, dt);
        Eigen::MatrixXd P = computeP(r.q, xNew, dt);
        Eigen::MatrixXd qNew = r.q;
        temporalSolve(qNew, P, dt);

        double resQ = (qNew - r.q).cwiseAbs().maxCoeff();
        double resX = (xNew - r.x).cwiseAbs().maxCoeff();
        double scaleQ = 1.0 + r.q.cwiseAbs().maxCoeff();
        double scaleX = 1.0 + r.x.cwiseAbs().maxCoeff();
        if (!std::isfinite(resQ) || !std::isfinite(resX) || resQ > 1e6 * scaleQ)
            throw SolverError(SolverError::Kind::Predictor,
                              fmt::format("predictor diverged at iteration {}", iter));
        r.q = qNew;
        r.x = xNew;
        updateVelocities(r.V, r.q, r.x, t0, dt, mode, vOverride);
        r.iterations = iter;
        if (resQ < tol_ * scaleQ && resX < tol_ * scaleX) break;
    }
    return r;
}

State Predictor::evalState(const Result& r, double xi, double eta, double tau) const {
    const int ns = st_.spatialSize();
    const int nt = st_.levels();
    Eigen::VectorXd phi(ns), lt(nt);
    st_.spatial().evalAll(xi, eta, phi);
    st_.temporalValues(tau, lt);
    State q = State::Zero(r.q.cols());
    for (int m = 0; m < nt; ++m)
        for (int s = 0; s < ns; ++s)
            q += lt(m) * phi(s) * r.q.row(m * ns + s).transpose();
    return q;
}

Vec2 Predictor::evalVelocity(const Result& r, double xi, double eta, double tau) const {
    const int ns = st_.spatialSize();
    const int nt = st_.levels();
    Eigen::VectorXd phi(ns), lt(nt);
    st_.spatial().evalAll(xi, eta, phi);
    st_.temporalValues(tau, lt);
    Vec2 v = Vec2::Zero();
    for (int m = 0; m < nt; ++m)
        for (int s = 0; s < ns; ++s) v += lt(m) * phi(s) * Vec2(r.V.row(m * ns + s));
    return v;
}

Vec2 Predictor::evalPosition(const Result& r, double xi, double eta, double tau) const {
    const int ns = st_.spatialSize();
    const int nt = st_.levels();
    Eigen::VectorXd phi(ns), lt(nt);
    st_.spatial().evalAll(xi, eta, phi);
    st_.temporalValues(tau, lt);
    Vec2 x = Vec2::Zero();
    for (int m = 0; m < nt; ++m)
        for (int s = 0; s < ns; ++s) x += lt(m) * phi(s) * Vec2(r.x.row(m * ns + s));
    return x;
}

}  // namespace alefv
