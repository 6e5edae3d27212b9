#ifndef ALEFV_CASES_HPP
#define ALEFV_CASES_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "alefv/stepper.hpp"

namespace alefv {

// Everything needed to run one benchmark problem end to end.
struct CaseSetup {
    std::string name;
    TriMesh mesh;
    Physics phys{SystemKind::Euler, 1.4};
    StepperParams params;
    std::map<int, BoundaryCondition> bcs;
    std::function<State(const Vec2&)> ic;  // pointwise primitive->conserved IC
    // Direct cell averages overriding `ic` for elements listed in
    // `averageOverride` (energy-deposition cells).
    std::map<int, State> averageOverride;
    double tFinal = 0.0;
    // Exact or reference conserved state field at (x, t); empty if the case
    // has no usable reference.
    std::function<State(const Vec2&, double)> reference;
    bool radialProfile = false;  // radially symmetric case (scatter output)
};

struct RunConfig {
    std::string caseName;
    int order = 3;                        // scheme order M+1
    std::string fluxMode = "";            // ""=case default, else 1d-hll,
                                          // 1d-hllc, multid-hll, multid-hllc, blend
    double cfl = -1.0;                    // <0: case default
    int meshRes = -1;                     // <0: case default
    double tFinal = -1.0;                 // <0: case default
    int rezone = -1;                      // -1 default, 0 off, 1 on
    std::string motion = "";              // ""=lagrangian, or "eulerian"
    std::string outDir = ".";
    int snapshotEvery = 0;                // 0: final only
    int maxSteps = 1000000;
};

// Registry: builds the fully configured problem, applying config overrides.
// Throws SolverError{Config} for unknown case names or invalid settings.
CaseSetup buildCase(const RunConfig& cfg);
std::vector<std::string> caseNames();

// Configures a stepper from the setup (mesh, params, BCs, initial averages).
Stepper makeStepper(const CaseSetup& setup);

struct ErrorNorms {
    double l1 = 0.0, l2 = 0.0;
};

// L1/L2 error of one conserved variable against a reference field, measured
// on the (moved) final mesh by element quadrature.
ErrorNorms errorNorms(const Stepper& st,
                      const std::function<State(const Vec2&, double)>& ref,
                      double t, int var = 0, int quadDegree = 8);

// Characteristic mesh size: maximum circumcircle diameter.
double meshSize(const TriMesh& mesh);

struct RunResult {
    int steps = 0;
    double tEnd = 0.0;
    double wallSeconds = 0.0;
    State totalConserved;
    ErrorNorms errors;       // valid only when the case has a reference
    bool hasErrors = false;
};

// Drives a configured stepper to the final time (step clamping at t_f).
RunResult runCase(Stepper& st, const CaseSetup& setup, int maxSteps = 1000000,
                  const std::function<void(const Stepper&, int)>& onStep = {});

// Self-similar shell-compression exact solution (gamma = 2, s0 = 1).
struct ShellCompression {
    double ri0 = 0.9, re0 = 1.0, rhoi0 = 1.0, rhoe0 = 2.0, gamma = 2.0;
    double tau() const;
    double h(double t) const;
    double hdot(double t) const;
    double rho0(double r) const;          // initial density profile
    State prim(const Vec2& x, double t) const;  // primitive state at (x, t)
};

// Second-order 1D finite volume solution of the cylindrically symmetric
// Euler equations with geometric source terms (reference for the explosion
// problem).  Returns primitive (rho, u_r, p) samples on cell centers.
struct RadialReference {
    std::vector<double> r, rho, u, p;
    // Piecewise-linear interpolation in radius.
    void sample(double radius, double& rhoOut, double& uOut, double& pOut) const;
};
RadialReference solveCylindricalRiemann(double rhoIn, double pIn, double rhoOut,
                                        double pOut, double rInterface,
                                        double rMax, double gamma, double tEnd,
                                        int cells = 10000);

}  // namespace alefv

#endif
