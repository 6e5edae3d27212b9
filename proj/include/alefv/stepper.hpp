#ifndef ALEFV_STEPPER_HPP
#define ALEFV_STEPPER_HPP

#include <functional>
#include <map>
#include <vector>

#include "alefv/mesh.hpp"
#include "alefv/mesh_motion.hpp"
#include "alefv/predictor.hpp"
#include "alefv/riemann.hpp"
#include "alefv/weno.hpp"

namespace alefv {

enum class FluxMode { MultiD, Pure1D };
enum class EdgeSolverKind { Hll, Hllc };
enum class NodeFluxKind { Hll, Hllc, Blend };

struct BoundaryCondition {
    enum class Kind { SlipWall, NoSlipWall, MovingWall, Transmissive, Dirichlet };
    Kind kind = Kind::Transmissive;
    // MovingWall: prescribed wall velocity.
    VelocityField wallVelocity;
    // Dirichlet: exact exterior state as a function of position and time.
    std::function<State(const Vec2&, double)> state;
};

struct StepperParams {
    int degree = 1;                    // polynomial degree M (order M+1)
    double cfl = 0.95;
    MeshMotionMode motion = MeshMotionMode::Lagrangian;
    FluxMode fluxMode = FluxMode::MultiD;
    EdgeSolverKind edgeSolver = EdgeSolverKind::Hll;
    NodeFluxKind nodeFlux = NodeFluxKind::Blend;
    double sensorLo = 0.05, sensorHi = 0.30;
    bool rezone = false;
    double omegaBeta = 1.0;
    double areaDropTrigger = 0.05;     // auto-rezone when areas shrink past this
    WenoParams weno{};
    int maxDtRetries = 4;
    // Test hook: prescribe the mesh velocity field instead of deriving it
    // from the flow (also forwarded to the predictors).
    VelocityField velocityOverride;
};

struct StepReport {
    double dt = 0.0;
    State totalBefore, totalAfter;     // sum of |T_i| Q_i
    double minArea = 0.0;
    int predictorFallbacks = 0;        // elements re-run with constant data
    int rescuedFaces = 0;              // faces redone with first-order fluxes
    int nodeFallbacks = 0;             // vertices without a usable node solution
    int rezonedVertices = 0;
    int dtRetries = 0;
};

// One-step ALE finite volume scheme on a moving triangulation.
class Stepper {
public:
    Stepper(TriMesh mesh, const Physics& phys, StepperParams params);

    void setBoundary(int tag, BoundaryCondition bc) { bcs_[tag] = bc; }

    // Cell averages by quadrature of a pointwise initial state.
    void setInitialCondition(const std::function<State(const Vec2&)>& f,
                             int quadDegree = 8);
    void setAverages(const Eigen::MatrixXd& q) { Q_ = q; }

    double computeTimestep() const;
    StepReport step();             // CFL timestep
    StepReport step(double dt);    // forced timestep (still retried on failure)

    const TriMesh& mesh() const { return mesh_; }
    TriMesh& mesh() { return mesh_; }
    const Physics& physics() const { return phys_; }
    const StepperParams& params() const { return params_; }
    StepperParams& params() { return params_; }
    const Eigen::MatrixXd& averages() const { return Q_; }
    State average(int i) const { return Q_.row(i).transpose(); }
    double time() const { return mesh_.time; }
    State totalConserved() const;

private:
    struct FacePoint {
        Vec3 normal;   // unnormalized space-time normal, area-weighted
        Vec2 x;        // physical position on the face
        double t;      // physical time
    };

    StepReport attempt(double dt);
    void solvePredictors(double dt, std::vector<Predictor::Result>& preds,
                         StepReport& rep) const;
    void solveNodes(double dt, const std::vector<Predictor::Result>& preds,
                    std::vector<std::vector<NodeSolution>>& sols,
                    std::vector<char>& nodeOk, std::vector<Vec2>& vbar,
                    StepReport& rep) const;
    Vec2 boundaryVelocity(int k, const Vec2& vGuess, double dt) const;
    bool mirroredWallNodeVelocity(int k, double dt,
                                  const std::vector<Predictor::Result>& preds,
                                  Vec2& vOut) const;
    std::vector<Vec2> moveVertices(double dt, const std::vector<Vec2>& vbar,
                                   StepReport& rep) const;
    const BoundaryCondition& boundaryFor(int tag) const;
    State ghostState(const State& inner, const BoundaryCondition& bc,
                     const Vec3& normal, const Vec2& x, double t) const;

    TriMesh mesh_;
    Physics phys_;
    StepperParams params_;
    WenoReconstructor weno_;
    Predictor pred_;
    NodeSolver node_;
    Eigen::MatrixXd Q_;                     // NE x nvars cell averages
    std::map<int, BoundaryCondition> bcs_;
    BoundaryCondition defaultBc_;
    std::vector<std::vector<int>> vertexBoundaryFaces_;
};

}  // namespace alefv

#endif
