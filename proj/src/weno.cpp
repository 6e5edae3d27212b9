#include "alefv/weno.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

namespace alefv {

namespace {
double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool inCone(const Vec2& d, const Vec2& u, const Vec2& v) {
    double den = cross2(u, v);
    if (den <= 0.0) return false;
    double alpha = cross2(d, v) / den;
    double beta = cross2(u, d) / den;
    double tol = -1e-12 * (std::abs(alpha) + std::abs(beta) + 1.0);
    return alpha >= tol && beta >= tol;
}
}  // namespace

WenoReconstructor::WenoReconstructor(const TriMesh& mesh, int degree, WenoParams params)
    : degree_(degree), params_(params), basis_(degree) {
    if (degree < 0 || degree > kMaxDegree)
        throw SolverError(SolverError::Kind::Config, "unsupported reconstruction degree");
    buildStencils(mesh);
}

void WenoReconstructor::buildStencils(const TriMesh& mesh) {
    const int ne = mesh.numElements();
    stencils_.resize(ne);
    tables_.resize(ne);
    if (degree_ == 0) {
        for (int i = 0; i < ne; ++i)
            for (auto& s : stencils_[i]) s = {{i, 0, 0}};
        return;
    }
    const int target = stencilTarget();

    auto offsetVec = [&mesh](const Member& m) -> Vec2 {
        if (!mesh.periodic) return Vec2::Zero();
        return {m.sx * mesh.period.x(), m.sy * mesh.period.y()};
    };
    auto stepAcross = [&mesh](const Member& m, int e) -> Member {
        int nb = mesh.neighbor[m.elem][e];
        Member next{nb, m.sx, m.sy};
        if (mesh.periodic && nb >= 0) {
            int v = mesh.tri[m.elem][e];
            int cnb = 0;
            while (mesh.tri[nb][cnb] != v) ++cnb;
            Vec2 delta = mesh.shift[m.elem][e] - mesh.shift[nb][cnb];
            next.sx += static_cast<int>(std::lround(delta.x() / mesh.period.x()));
            next.sy += static_cast<int>(std::lround(delta.y() / mesh.period.y()));
        }
        return next;
    };

    for (int i = 0; i < ne; ++i) {
        const Vec2 g = mesh.centroid(i);
        const Vec2 p[3] = {mesh.cornerPos(i, 0), mesh.cornerPos(i, 1), mesh.cornerPos(i, 2)};
        const Vec2 mid[3] = {0.5 * (p[0] + p[1]), 0.5 * (p[1] + p[2]), 0.5 * (p[2] + p[0])};

        auto grow = [&](int sidx, const std::function<bool(const Vec2&)>& inSector) {
            std::vector<Member>& st = stencils_[i][sidx];
            st = {{i, 0, 0}};
            while (static_cast<int>(st.size()) < target) {
                Member best{-1, 0, 0};
                double bestDist = std::numeric_limits<double>::max();
                bool bestIn = false;
                for (const Member& m : st) {
                    for (int e = 0; e < 3; ++e) {
                        Member c = stepAcross(m, e);
                        if (c.elem < 0) continue;
                        if (std::find(st.begin(), st.end(), c) != st.end()) continue;
                        Vec2 pos = mesh.centroid(c.elem) + offsetVec(c);
                        bool in = inSector(pos - g);
                        double dist = (pos - g).squaredNorm();
                        if ((in && !bestIn) || (in == bestIn && dist < bestDist)) {
                            best = c;
                            bestDist = dist;
                            bestIn = in;
                        }
                    }
                }
                if (best.elem < 0)
                    throw SolverError(
                        SolverError::Kind::Config,
                        fmt::format("stencil of element {} cannot reach {} members", i,
                                    target));
                st.push_back(best);
            }
        };

        grow(0, [](const Vec2&) { return true; });  // central, distance-ordered
        for (int e = 0; e < 3; ++e) {
            Vec2 u = p[e] - g, v = p[(e + 1) % 3] - g;
            grow(1 + e, [u, v](const Vec2& d) { return inCone(d, u, v); });
        }
        for (int c = 0; c < 3; ++c) {
            Vec2 u = mid[(c + 2) % 3] - g, v = mid[c] - g;
            grow(4 + c, [u, v](const Vec2& d) { return inCone(d, u, v); });
        }

        // Union table for shared row assembly.
        ElementTables& tab = tables_[i];
        for (int s = 0; s < kStencils; ++s) {
            for (const Member& m : stencils_[i][s]) {
                if (m.elem == i && m.sx == 0 && m.sy == 0) continue;
                auto it = std::find(tab.unionMembers.begin(), tab.unionMembers.end(), m);
                int idx;
                if (it == tab.unionMembers.end()) {
                    idx = static_cast<int>(tab.unionMembers.size());
                    tab.unionMembers.push_back(m);
                } else {
                    idx = static_cast<int>(it - tab.unionMembers.begin());
                }
                tab.rows[s].push_back(idx);
            }
        }
    }
}

void WenoReconstructor::solveElement(const TriMesh& mesh, const Eigen::MatrixXd& averages,
                                     int elem, std::array<RecCoeffs, kStencils>* perStencil,
                                     RecCoeffs* blended) const {
    const int nm = modes();
    const int nv = static_cast<int>(averages.rows());
    if (degree_ == 0) {
        RecCoeffs c(1, nv);
        c.row(0) = averages.col(elem).transpose();
        if (blended) *blended = c;
        if (perStencil) perStencil->fill(c);
        return;
    }

    const ReferenceMap home = mesh.refMap(elem);
    const Mat2 Ainv = home.A.inverse();
    const ElementTables& tab = tables_[elem];
    const int nu = static_cast<int>(tab.unionMembers.size());

    Eigen::MatrixXd rows(nu, nm);
    Eigen::VectorXd rbuf(nm);
    for (int k = 0; k < nu; ++k) {
        const Member& m = tab.unionMembers[k];
        ReferenceMap mj = mesh.refMap(m.elem);
        Vec2 off = Vec2::Zero();
        if (mesh.periodic) off = {m.sx * mesh.period.x(), m.sy * mesh.period.y()};
        basis_.averagesOverAffineImage(Ainv * (mj.p + off - home.p), Ainv * mj.A, rbuf);
        rows.row(k) = rbuf.transpose();
    }

    const Eigen::MatrixXd& sig = basis_.sigmaMatrix();
    Eigen::MatrixXd sigma1 = sig.block(1, 1, nm - 1, nm - 1);

    Eigen::MatrixXd wsum = Eigen::MatrixXd::Zero(nm - 1, nv);
    Eigen::MatrixXd sigmaAll(kStencils, nv);
    std::array<Eigen::MatrixXd, kStencils> sols;
    for (int s = 0; s < kStencils; ++s) {
        const auto& idx = tab.rows[s];
        const int ns = static_cast<int>(idx.size());
        Eigen::MatrixXd G(ns, nm - 1);
        Eigen::MatrixXd B(ns, nv);
        for (int r = 0; r < ns; ++r) {
            G.row(r) = rows.row(idx[r]).tail(nm - 1);
            B.row(r) = (averages.col(tab.unionMembers[idx[r]].elem) - averages.col(elem))
                           .transpose();
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
        Eigen::MatrixXd W;
        if (qr.rank() < nm - 1) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU |
                                                         Eigen::ComputeThinV);
            svd.setThreshold(1e-10);
            W = svd.solve(B);
        } else {
            W = qr.solve(B);
        }
        sols[s] = W;
        for (int v = 0; v < nv; ++v)
            sigmaAll(s, v) = W.col(v).dot(sigma1 * W.col(v));
        if (perStencil) {
            RecCoeffs c(nm, nv);
            c.row(0) = averages.col(elem).transpose();
            c.bottomRows(nm - 1) = W;
            (*perStencil)[s] = c;
        }
    }

    if (!blended) return;
    RecCoeffs out(nm, nv);
    out.row(0) = averages.col(elem).transpose();
    for (int v = 0; v < nv; ++v) {
        Eigen::VectorXd omega = nonlinearWeights(sigmaAll.col(v));
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(nm - 1);
        for (int s = 0; s < kStencils; ++s) acc += omega(s) * sols[s].col(v);
        out.col(v).tail(nm - 1) = acc;
    }
    *blended = out;
}

void WenoReconstructor::reconstruct(const TriMesh& mesh, const Eigen::MatrixXd& averages,
                                    std::vector<RecCoeffs>& out) const {
    const int ne = mesh.numElements();
    out.resize(ne);
    for (int i = 0; i < ne; ++i) solveElement(mesh, averages, i, nullptr, &out[i]);
}

std::array<RecCoeffs, WenoReconstructor::kStencils> WenoReconstructor::stencilSolutions(
    const TriMesh& mesh, const Eigen::MatrixXd& averages, int elem) const {
    std::array<RecCoeffs, kStencils> result;
    solveElement(mesh, averages, elem, &result, nullptr);
    return result;
}

double WenoReconstructor::oscillationIndicator(
    const Eigen::Ref<const Eigen::VectorXd>& modal) const {
    return modal.dot(basis_.sigmaMatrix() * modal);
}

Eigen::VectorXd WenoReconstructor::nonlinearWeights(const Eigen::VectorXd& sigma) const {
    Eigen::VectorXd omega(kStencils);
    double sum = 0.0;
    for (int s = 0; s < kStencils; ++s) {
        double lambda = (s == 0) ? params_.lambdaCentral : params_.lambdaSided;
        double w = lambda / std::pow(sigma(s) + params_.epsilon, params_.r);
        if (!std::isfinite(w)) w = 0.0;
        omega(s) = w;
        sum += w;
    }
    if (sum <= 0.0) {
        // All indicators overflowed; fall back to the linear weights.
        for (int s = 0; s < kStencils; ++s)
            omega(s) = (s == 0) ? params_.lambdaCentral : params_.lambdaSided;
        sum = omega.sum();
    }
    return omega / sum;
}

State WenoReconstructor::evaluate(const DubinerBasis& basis, const RecCoeffs& c, double xi,
                                  double eta) {
    State q = State::Zero(c.cols());
    for (int l = 0; l < c.rows(); ++l) {
        double psi = basis.eval(l, xi, eta);
        for (int v = 0; v < c.cols(); ++v) q(v) += psi * c(l, v);
    }
    return q;
}

}  // namespace alefv
