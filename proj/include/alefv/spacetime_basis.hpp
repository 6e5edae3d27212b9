#ifndef ALEFV_SPACETIME_BASIS_HPP
#define ALEFV_SPACETIME_BASIS_HPP

#include <vector>

#include "alefv/basis.hpp"

namespace alefv {

// Nodal basis on the reference prism T_e x [0,1]: spatial Lagrange nodes of
// degree M crossed with M+1 Gauss-Lobatto levels in tau, so the tau=0 slice
// is a plain index partition of the degrees of freedom.  Global node index
// l = level*Ns + spatial_node.
class SpaceTimeBasis {
public:
    explicit SpaceTimeBasis(int degree);

    int degree() const { return degree_; }
    int spatialSize() const { return spatial_.size(); }
    int levels() const { return static_cast<int>(tau_.points.size()); }
    int size() const { return spatialSize() * levels(); }

    const TriNodalBasis& spatial() const { return spatial_; }
    double tauLevel(int m) const { return tau_.points[m]; }

    Vec2 spatialNode(int l) const { return spatial_.node(l % spatialSize()); }
    int levelOf(int l) const { return l / spatialSize(); }

    double evalTheta(int l, double xi, double eta, double tau) const;

    // Temporal Lagrange values L_m(tau), m = 0..levels-1.
    void temporalValues(double tau, Eigen::Ref<Eigen::VectorXd> vals) const;

    // Dt(k,m) = L_m'(tau_k): collocation derivative across tau levels.
    const Eigen::MatrixXd& temporalDiff() const { return Dt_; }

    // <theta_k, d theta_l / d tau> and <theta_k, theta_l> over the prism.
    const Eigen::MatrixXd& Ktau() const { return Ktau_; }
    const Eigen::MatrixXd& massMatrix() const { return mass_; }

    // Temporal factors: Kt(k,m) = int L_k L_m', Mt(k,m) = int L_k L_m.
    const Eigen::MatrixXd& Kt() const { return Kt_; }
    const Eigen::MatrixXd& Mt() const { return Mt_; }
    // Inverse of Kt restricted to rows/cols 1..M (the tau>0 unknowns).
    const Eigen::MatrixXd& KtInnerInv() const { return Kt_inner_inv_; }

    // Time average of L_m over [0,1] (row of exact integrals).
    const Eigen::VectorXd& temporalAverages() const { return t_avg_; }

private:
    int degree_;
    TriNodalBasis spatial_;
    QuadRule1D tau_;
    std::vector<Eigen::VectorXd> tau_lagrange_;  // coefficient vectors (monomial in tau)
    Eigen::MatrixXd Ktau_, mass_, Kt_, Mt_, Kt_inner_inv_, Dt_;
    Eigen::VectorXd t_avg_;
};

}  // namespace alefv

#endif
