#include "alefv/spacetime_basis.hpp"

#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

namespace alefv {

SpaceTimeBasis::SpaceTimeBasis(int degree)
    : degree_(degree), spatial_(degree), tau_(gaussLobatto01(degree + 1)) {
    const int nt = levels();
    const int ns = spatialSize();

    // Temporal Lagrange polynomials in monomial coefficients via Vandermonde.
    Eigen::MatrixXd V(nt, nt);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nt; ++j) V(i, j) = std::pow(tau_.points[i], j);
    Eigen::MatrixXd C = V.inverse();  // column m = coeffs of L_m
    tau_lagrange_.resize(nt);
    for (int m = 0; m < nt; ++m) tau_lagrange_[m] = C.col(m);

    Kt_.setZero(nt, nt);
    Mt_.setZero(nt, nt);
    t_avg_.setZero(nt);
    for (int k = 0; k < nt; ++k) {
        const auto& ck = tau_lagrange_[k];
        for (int i = 0; i < nt; ++i) t_avg_(k) += ck(i) / (i + 1);
        for (int m = 0; m < nt; ++m) {
            const auto& cm = tau_lagrange_[m];
            for (int i = 0; i < nt; ++i)
                for (int j = 0; j < nt; ++j) {
                    Mt_(k, m) += ck(i) * cm(j) / (i + j + 1);
                    if (j > 0) Kt_(k, m) += ck(i) * cm(j) * j / (i + j);
                }
        }
    }

    Dt_.setZero(nt, nt);
    for (int k = 0; k < nt; ++k)
        for (int m = 0; m < nt; ++m) {
            const auto& cm = tau_lagrange_[m];
            double d = 0.0, p = 1.0;
            for (int i = 1; i < nt; ++i) {
                d += i * cm(i) * p;
                p *= tau_.points[k];
            }
            Dt_(k, m) = d;
        }

    if (degree_ > 0) {
        Kt_inner_inv_ = Kt_.block(1, 1, degree_, degree_).inverse();
    } else {
        Kt_inner_inv_.resize(0, 0);
    }

    // Spatial mass matrix, then the prism matrices as tensor products.
    Eigen::MatrixXd Ms = Eigen::MatrixXd::Zero(ns, ns);
    const TriQuadRule& rule = triangleQuadrature(2 * degree_);
    Eigen::VectorXd vals(ns);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        spatial_.evalAll(rule.points[q].x(), rule.points[q].y(), vals);
        Ms.noalias() += rule.weights[q] * vals * vals.transpose();
    }
    Ktau_ = Eigen::kroneckerProduct(Kt_, Ms);
    mass_ = Eigen::kroneckerProduct(Mt_, Ms);
}

double SpaceTimeBasis::evalTheta(int l, double xi, double eta, double tau) const {
    const int m = l / spatialSize();
    const int s = l % spatialSize();
    const auto& cm = tau_lagrange_[m];
    double lt = 0.0, p = 1.0;
    for (int i = 0; i < cm.size(); ++i, p *= tau) lt += cm(i) * p;
    return lt * spatial_.eval(s, xi, eta);
}

void SpaceTimeBasis::temporalValues(double tau, Eigen::Ref<Eigen::VectorXd> vals) const {
    for (int m = 0; m < levels(); ++m) {
        const auto& cm = tau_lagrange_[m];
        double lt = 0.0, p = 1.0;
        for (int i = 0; i < cm.size(); ++i, p *= tau) lt += cm(i) * p;
        vals(m) = lt;
    }
}

}  // namespace alefv
