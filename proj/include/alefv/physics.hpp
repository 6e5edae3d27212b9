#ifndef ALEFV_PHYSICS_HPP
#define ALEFV_PHYSICS_HPP

#include <utility>

#include "alefv/types.hpp"

namespace alefv {

enum class SystemKind { Euler, Mhd };

// Conserved layout: (rho, rho u, rho v, rho E) for Euler, plus (Bx, By, Psi)
// for the divergence-cleaned MHD system.  Primitive layout mirrors it with
// (rho, u, v, p, [Bx, By, Psi]).
class Physics {
public:
    Physics(SystemKind kind, double gamma, double ch = 0.0);

    SystemKind kind() const { return kind_; }
    int numVars() const { return kind_ == SystemKind::Euler ? 4 : 7; }
    double gamma() const { return gamma_; }
    double cleaningSpeed() const { return ch_; }

    bool admissible(const State& q) const;
    void requireAdmissible(const State& q) const;

    double pressure(const State& q) const;
    State fromPrimitive(const State& prim) const;
    State toPrimitive(const State& q) const;

    // Cartesian flux pair (f, g).
    void flux(const State& q, State& f, State& g) const;
    // Directional physical flux f*nx + g*ny.
    State fluxNormal(const State& q, const Vec2& n) const;
    // ALE flux in direction n with normal mesh speed Vn: F.n - Vn*Q.
    State fluxAle(const State& q, const Vec2& n, double Vn) const;

    double soundSpeed(const State& q) const;
    // Fastest signal speed in direction n (fast magnetosonic for MHD,
    // maxed with the cleaning speed).
    double signalSpeed(const State& q, const Vec2& n) const;
    double maxAbsEigenvalue(const State& q) const;

    // Davis-type bounds for the moving-frame normal Jacobian; s_L <= s_R.
    std::pair<double, double> eigenEstimatesNormal(const State& ql, const State& qr,
                                                   const Vec2& n, double Vn) const;

    Vec2 velocity(const State& q) const { return {q(1) / q(0), q(2) / q(0)}; }

private:
    SystemKind kind_;
    double gamma_;
    double ch_;
};

}  // namespace alefv

#endif
