#include "alefv/mesh_motion.hpp"

#include <cmath>

#include "alefv/basis.hpp"

namespace alefv {

Vec2 nodeVelocityAverage(const std::vector<Vec2>& v,
                         const std::vector<double>& mass) {
    if (v.empty() || v.size() != mass.size())
        throw SolverError(SolverError::Kind::Geometry,
                          "node velocity average needs a nonempty matched fan");
    Vec2 num = Vec2::Zero();
    double den = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        num += mass[j] * v[j];
        den += mass[j];
    }
    if (!(den > 0.0))
        throw SolverError(SolverError::Kind::Geometry,
                          "zero total mass around vertex");
    return num / den;
}

Vec2 nodeVelocityMultid(const NodeSolver& solver, const std::vector<Vec2>& eta,
                        const std::vector<std::vector<State>>& qAtTime,
                        double dt, double hllcWeight) {
    const int ng = static_cast<int>(qAtTime.size());
    QuadRule1D rule = gaussLegendre01(ng);
    Vec2 v = Vec2::Zero();
    for (int g = 0; g < ng; ++g) {
        NodeSolution sol = solver.solve(eta, qAtTime[g], dt, hllcWeight);
        v += rule.weights[g] * sol.nodeVelocity;
    }
    return v;
}

namespace {

// kappa = N / D with N = |a-x|^2 + |b-x|^2 and D = cross(a-x, b-x), plus
// its analytic gradient and Hessian with respect to x.
struct KappaTerm {
    double value;
    Vec2 grad;
    Mat2 hess;
};

KappaTerm kappaTerm(const Vec2& x, const Vec2& a, const Vec2& b) {
    Vec2 u = a - x, v = b - x;
    double N = u.squaredNorm() + v.squaredNorm();
    double D = u.x() * v.y() - u.y() * v.x();
    if (!(std::abs(D) > 0.0))
        throw SolverError(SolverError::Kind::Geometry,
                          "degenerate fan triangle in rezoning");
    Vec2 gN = -2.0 * (u + v);
    Vec2 gD(a.y() - b.y(), b.x() - a.x());  // constant in x
    KappaTerm t;
    t.value = N / D;
    t.grad = gN / D - (N / (D * D)) * gD;
    t.hess = (4.0 / D) * Mat2::Identity() -
             (gN * gD.transpose() + gD * gN.transpose()) / (D * D) +
             (2.0 * N / (D * D * D)) * gD * gD.transpose();
    return t;
}

}  // namespace

double conditionNumberObjective(const Vec2& x,
                                const std::vector<std::pair<Vec2, Vec2>>& opposite) {
    double k = 0.0;
    for (const auto& [a, b] : opposite) k += kappaTerm(x, a, b).value;
    return k;
}

Vec2 rezoneVertex(const Vec2& xLag,
                  const std::vector<std::pair<Vec2, Vec2>>& opposite) {
    Vec2 g = Vec2::Zero();
    Mat2 H = Mat2::Zero();
    double scale = 0.0;
    for (const auto& [a, b] : opposite) {
        KappaTerm t = kappaTerm(xLag, a, b);
        g += t.grad;
        H += t.hess;
        scale += t.hess.cwiseAbs().maxCoeff();
    }
    double det = H.determinant();
    if (!(std::abs(det) > 1e-12 * scale * scale)) return xLag;
    return xLag - H.inverse() * g;
}

double computeOmega(const std::vector<Mat2>& deformation, double beta) {
    double sigma = 0.0;
    for (const Mat2& F : deformation) {
        Eigen::JacobiSVD<Mat2> svd(F);
        double s0 = svd.singularValues()(0), s1 = svd.singularValues()(1);
        if (!(s1 > 0.0))
            return 1.0;  // collapsed deformation: full rezoning
        sigma = std::max(sigma, std::abs(std::log(s0 / s1)));
    }
    return std::clamp(1.0 - std::exp(-beta * sigma), 0.0, 1.0);
}

}  // namespace alefv
