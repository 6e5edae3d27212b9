#ifndef ALEFV_BASIS_HPP
#define ALEFV_BASIS_HPP

#include <array>
#include <vector>

#include "alefv/types.hpp"

namespace alefv {

// Bivariate polynomial on the reference triangle, dense coefficients of
// xi^a * eta^b with a+b <= degree.
class Poly2 {
public:
    Poly2() { coeff_.setZero(1, 1); }
    explicit Poly2(int degree) : deg_(degree) { coeff_.setZero(degree + 1, degree + 1); }

    int degree() const { return deg_; }
    double& c(int a, int b) { return coeff_(a, b); }
    double c(int a, int b) const { return (a <= deg_ && b <= deg_) ? coeff_(a, b) : 0.0; }

    double eval(double xi, double eta) const;
    Poly2 dXi() const;
    Poly2 dEta() const;
    Poly2 operator*(const Poly2& other) const;
    Poly2& operator+=(const Poly2& other);
    Poly2& scale(double s);

    // Exact integral over the reference triangle {xi,eta>=0, xi+eta<=1}.
    double integrateRef() const;

private:
    int deg_ = 0;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8> coeff_;
};

// Exact reference-triangle moment  \int xi^a eta^b = a! b! / (a+b+2)!.
double triangleMoment(int a, int b);

struct QuadRule1D {
    std::vector<double> points;   // on [0,1]
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre on [0,1], exact to degree 2n-1. n in 1..5.
QuadRule1D gaussLegendre01(int n);
// Gauss-Lobatto on [0,1] including both endpoints; n in 2..5.  n=1 returns {0}.
QuadRule1D gaussLobatto01(int n);

struct TriQuadRule {
    std::vector<Vec2> points;
    std::vector<double> weights;  // sum to |T_e| = 1/2
    int exactness = 0;
};

// Symmetric positive-weight rule with exactness >= the requested degree.
const TriQuadRule& triangleQuadrature(int degree);

// Orthogonal modal basis on the reference triangle.  psi_0 == 1 and
// int psi_l psi_m = (1/2) delta_lm (Gram-Schmidt over monomials with exact
// moments; sign fixed so the leading coefficient is positive).
class DubinerBasis {
public:
    explicit DubinerBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(funcs_.size()); }

    double eval(int l, double xi, double eta) const { return funcs_[l].eval(xi, eta); }
    const Poly2& poly(int l) const { return funcs_[l]; }

    // Row of cell-average values of all basis functions over the affine image
    // p + A*zeta of the reference triangle, i.e. (1/|T|) int_T psi_l(xi) dx
    // where the average is taken in the home reference frame coordinates.
    void averagesOverAffineImage(const Vec2& p, const Mat2& A,
                                 Eigen::Ref<Eigen::VectorXd> row) const;

    // Oscillation indicator matrix: sums of derivative products with
    // 1 <= alpha+beta <= degree, integrated over the reference triangle.
    const Eigen::MatrixXd& sigmaMatrix() const { return sigma_; }

private:
    int degree_;
    std::vector<Poly2> funcs_;
    Eigen::MatrixXd mono_coeff_;  // size x n_monomials, basis in monomial terms
    std::vector<std::array<int, 2>> mono_exp_;
    Eigen::MatrixXd sigma_;
};

// Lagrange nodal basis on the reference triangle with equispaced nodes
// (centroid for degree 0).  Used by the space-time predictor.
class TriNodalBasis {
public:
    explicit TriNodalBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const Vec2& node(int l) const { return nodes_[l]; }

    double eval(int l, double xi, double eta) const { return funcs_[l].eval(xi, eta); }
    void evalAll(double xi, double eta, Eigen::Ref<Eigen::VectorXd> vals) const;

    // Differentiation matrices: Dxi(l,m) = d phi_m / d xi at node l.
    const Eigen::MatrixXd& dXiAtNodes() const { return dxi_; }
    const Eigen::MatrixXd& dEtaAtNodes() const { return deta_; }

private:
    int degree_;
    std::vector<Vec2> nodes_;
    std::vector<Poly2> funcs_;
    Eigen::MatrixXd dxi_, deta_;
};

}  // namespace alefv

#endif
