#ifndef ALEFV_PREDICTOR_HPP
#define ALEFV_PREDICTOR_HPP

#include <functional>

#include "alefv/mesh.hpp"
#include "alefv/physics.hpp"
#include "alefv/spacetime_basis.hpp"
#include "alefv/weno.hpp"

namespace alefv {

enum class MeshMotionMode { Eulerian, Lagrangian };

// Optional replacement for the nodal mesh-velocity law (tests, manufactured
// motion): V = f(x, t).
using VelocityField = std::function<Vec2(const Vec2&, double)>;

// Element-local space-time Galerkin evolution of the reconstruction
// polynomial, iterated jointly with the nodal vertex trajectories.
class Predictor {
public:
    struct Result {
        Eigen::MatrixXd q;  // space-time nodal states, Lst x nvars
        Eigen::MatrixXd x;  // nodal coordinates, Lst x 2
        Eigen::MatrixXd V;  // nodal mesh velocities, Lst x 2
        double dt = 0.0;
        double t0 = 0.0;
        int iterations = 0;
    };

    Predictor(int degree, const Physics& phys, double tol = 1e-12);

    const SpaceTimeBasis& stBasis() const { return st_; }
    const Physics& physics() const { return phys_; }
    int maxIterations() const { return 2 * (degree_ + 1); }

    Result evolve(const ReferenceMap& geom, const DubinerBasis& recBasis,
                  const RecCoeffs& w, double dt, MeshMotionMode mode,
                  const VelocityField* vOverride = nullptr, double t0 = 0.0) const;

    // Stiffness-free source/advection bundle P at every space-time node for
    // the current iterate (exposed for verification).
    Eigen::MatrixXd computeP(const Eigen::MatrixXd& q, const Eigen::MatrixXd& x,
                             double dt) const;

    State evalState(const Result& r, double xi, double eta, double tau) const;
    Vec2 evalVelocity(const Result& r, double xi, double eta, double tau) const;
    Vec2 evalPosition(const Result& r, double xi, double eta, double tau) const;

private:
    void updateVelocities(Eigen::MatrixXd& V, const Eigen::MatrixXd& q,
                          const Eigen::MatrixXd& x, double t0, double dt,
                          MeshMotionMode mode, const VelocityField* vOverride) const;
    // Solve the restricted temporal system column-wise: levels 1..M of `out`
    // from nodal rates `rate`, keeping level 0 fixed.
    void temporalSolve(Eigen::MatrixXd& out, const Eigen::MatrixXd& rate,
                       double dt) const;

    int degree_;
    Physics phys_;
    double tol_;
    SpaceTimeBasis st_;
};

}  // namespace alefv

#endif
