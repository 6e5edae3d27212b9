#ifndef ALEFV_RIEMANN_HPP
#define ALEFV_RIEMANN_HPP

#include <vector>

#include "alefv/physics.hpp"
#include "alefv/types.hpp"

namespace alefv {

// --- One-dimensional ALE edge fluxes -------------------------------------
//
// Both solvers take the space-time face normal ntilde = (n_x, n_y, n_t),
// a unit vector in 3-space whose spatial part need not be unit.  The face
// moves with normal speed Vn = -n_t / |n_xy|, and the returned value is the
// full space-time flux G = F(q).n_xy + q * n_t upwinded across the face.
State hll1dAle(const Physics& phys, const State& qm, const State& qp,
               const Vec3& ntilde);

// HLLC with the contact wave restored in the moving frame.  Exact on
// isolated contacts.  For MHD the three-wave solver is used instead, since
// a single contact wave does not model the MHD fan.
State hllc1dAle(const Physics& phys, const State& qm, const State& qp,
                const Vec3& ntilde);

// --- Multidimensional vertex solver --------------------------------------
//
// Fan convention: eta[j] are the unit mesh-edge directions leaving the
// vertex, ordered counterclockwise and wrapping once around.  q[j] is the
// state of the sector between eta[j] and eta[j+1]; hence edge j separates
// q[j-1] (clockwise side) from q[j].
struct NodeSolution {
    State qStar;                  // strongly interacting state
    State qC1, qC2;               // contact substates (== qStar when !split)
    Vec2 contactNormal = Vec2::Zero();
    double contactSpeed = 0.0;
    bool split = false;           // contact split succeeded
    bool fallback = false;        // positivity fallback engaged
    double hllcWeight = 0.0;      // 0 = pure three-wave model
    Vec2 nodeVelocity = Vec2::Zero();
    std::vector<double> speeds;   // S_j per fan edge
    std::vector<Vec2> polygon;    // wave-model polygon vertices P_j
    double area = 0.0;
    int inflations = 0;           // positivity speed-inflation rounds used
};

class NodeSolver {
public:
    explicit NodeSolver(const Physics& phys) : phys_(phys) {}

    // hllcWeight in [0,1]: 0 solves the three-wave model only, >0 also
    // splits the interacting state across the contact plane.
    NodeSolution solve(const std::vector<Vec2>& eta, const std::vector<State>& q,
                       double dt, double hllcWeight = 0.0) const;

    // Robust last-resort solution: admissible primitive average of the fan.
    NodeSolution fallbackSolution(const std::vector<State>& q) const;

    // Space-time flux of the interacting state in direction ntilde.  For a
    // split solution, edgeDir (the mesh-edge direction of the face at this
    // vertex) selects the contact side; a zero edgeDir uses qStar.
    State vertexFlux(const NodeSolution& sol, const Vec3& ntilde,
                     const Vec2& edgeDir = Vec2::Zero()) const;

private:
    const Physics& phys_;
};

// Shock sensor: 1 in strong compression (use the three-wave model), 0 in
// smooth flow (contact split is safe).  Based on the largest approaching
// normal-velocity jump across the fan edges, normalized by sound speed.
double compressionSensor(const Physics& phys, const std::vector<Vec2>& eta,
                         const std::vector<State>& q, double lo = 0.05,
                         double hi = 0.30);

}  // namespace alefv

#endif
