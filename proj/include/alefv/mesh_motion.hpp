#ifndef ALEFV_MESH_MOTION_HPP
#define ALEFV_MESH_MOTION_HPP

#include <utility>
#include <vector>

#include "alefv/riemann.hpp"
#include "alefv/types.hpp"

namespace alefv {

// Mass-weighted average of the fan velocities around a vertex.
Vec2 nodeVelocityAverage(const std::vector<Vec2>& v,
                         const std::vector<double>& mass);

// Node velocity from the multidimensional vertex solver: the interacting
// state's velocity, Gauss-Legendre averaged over the temporal quadrature
// points of the step.  qAtTime[g] is the fan at temporal point g.
Vec2 nodeVelocityMultid(const NodeSolver& solver, const std::vector<Vec2>& eta,
                        const std::vector<std::vector<State>>& qAtTime,
                        double dt, double hllcWeight = 0.0);

// Shape-quality objective for a free vertex at x: sum over the fan
// triangles of the Frobenius condition number of the corner Jacobian
// J = [a - x, b - x], i.e. kappa = |J|_F^2 / det J.  opposite[j] holds the
// two fixed vertices (a, b) of fan triangle j, ordered so det J > 0.
double conditionNumberObjective(const Vec2& x,
                                const std::vector<std::pair<Vec2, Vec2>>& opposite);

// One Newton step on the objective from the Lagrangian position.  A
// singular Hessian leaves the vertex where it is.
Vec2 rezoneVertex(const Vec2& xLag,
                  const std::vector<std::pair<Vec2, Vec2>>& opposite);

// Relaxation weight from the per-step affine deformation gradients of the
// fan triangles: omega = 1 - exp(-beta * sigma), sigma the largest
// |log(singular value ratio)|.  Exactly zero for rigid fan motion.
double computeOmega(const std::vector<Mat2>& deformation, double beta = 1.0);

inline Vec2 relaxVertex(const Vec2& xLag, const Vec2& xRez, double omega) {
    return xLag + omega * (xRez - xLag);
}

}  // namespace alefv

#endif
