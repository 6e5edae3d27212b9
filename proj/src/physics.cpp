#include "alefv/physics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace alefv {

namespace {
constexpr double kFourPi = 4.0 * M_PI;
constexpr double kEightPi = 8.0 * M_PI;
}  // namespace

Physics::Physics(SystemKind kind, double gamma, double ch)
    : kind_(kind), gamma_(gamma), ch_(ch) {
    if (gamma_ <= 1.0)
        throw SolverError(SolverError::Kind::Config, "gamma must exceed 1");
    if (kind_ == SystemKind::Mhd && ch_ <= 0.0)
        throw SolverError(SolverError::Kind::Config, "cleaning speed must be positive");
}

bool Physics::admissible(const State& q) const {
    if (!q.allFinite() || q(0) <= 0.0) return false;
    double ke = 0.5 * (q(1) * q(1) + q(2) * q(2)) / q(0);
    double e = q(3) - ke;
    if (kind_ == SystemKind::Mhd) e -= (q(4) * q(4) + q(5) * q(5)) / kEightPi;
    return e > 0.0;
}

void Physics::requireAdmissible(const State& q) const {
    if (!admissible(q))
        throw SolverError(SolverError::Kind::Admissibility,
                          fmt::format("inadmissible state rho={} rhoE={}", q(0), q(3)));
}

double Physics::pressure(const State& q) const {
    double ke = 0.5 * (q(1) * q(1) + q(2) * q(2)) / q(0);
    double e = q(3) - ke;
    if (kind_ == SystemKind::Mhd) e -= (q(4) * q(4) + q(5) * q(5)) / kEightPi;
    double p = (gamma_ - 1.0) * e;
    if (!(p > 0.0) || !(q(0) > 0.0))
        throw SolverError(SolverError::Kind::Admissibility,
                          fmt::format("inadmissible state rho={} p={}", q(0), p));
    return p;
}

State Physics::fromPrimitive(const State& prim) const {
    const int n = numVars();
    State q(n);
    double rho = prim(0), u = prim(1), v = prim(2), p = prim(3);
    q(0) = rho;
    q(1) = rho * u;
    q(2) = rho * v;
    q(3) = p / (gamma_ - 1.0) + 0.5 * rho * (u * u + v * v);
    if (kind_ == SystemKind::Mhd) {
        q(3) += (prim(4) * prim(4) + prim(5) * prim(5)) / kEightPi;
        q(4) = prim(4);
        q(5) = prim(5);
        q(6) = prim(6);
    }
    return q;
}

State Physics::toPrimitive(const State& q) const {
    const int n = numVars();
    State prim(n);
    prim(0) = q(0);
    prim(1) = q(1) / q(0);
    prim(2) = q(2) / q(0);
    prim(3) = pressure(q);
    if (kind_ == SystemKind::Mhd) {
        prim(4) = q(4);
        prim(5) = q(5);
        prim(6) = q(6);
    }
    return prim;
}

void Physics::flux(const State& q, State& f, State& g) const {
    const int n = numVars();
    f.resize(n);
    g.resize(n);
    double rho = q(0), u = q(1) / rho, v = q(2) / rho;
    double p = pressure(q);
    if (kind_ == SystemKind::Euler) {
        f(0) = q(1);
        f(1) = q(1) * u + p;
        f(2) = q(2) * u;
        f(3) = u * (q(3) + p);
        g(0) = q(2);
        g(1) = q(1) * v;
        g(2) = q(2) * v + p;
        g(3) = v * (q(3) + p);
        return;
    }
    double bx = q(4), by = q(5), psi = q(6);
    double pt = p + (bx * bx + by * by) / kEightPi;
    double vdotb = u * bx + v * by;
    f(0) = q(1);
    f(1) = q(1) * u + pt - bx * bx / kFourPi;
    f(2) = q(2) * u - by * bx / kFourPi;
    f(3) = u * (q(3) + pt) - bx * vdotb / kFourPi;
    f(4) = psi;
    f(5) = by * u - v * bx;
    f(6) = ch_ * ch_ * bx;
    g(0) = q(2);
    g(1) = q(1) * v - bx * by / kFourPi;
    g(2) = q(2) * v + pt - by * by / kFourPi;
    g(3) = v * (q(3) + pt) - by * vdotb / kFourPi;
    g(4) = bx * v - u * by;
    g(5) = psi;
    g(6) = ch_ * ch_ * by;
}

State Physics::fluxNormal(const State& q, const Vec2& n) const {
    State f, g;
    flux(q, f, g);
    return f * n.x() + g * n.y();
}

State Physics::fluxAle(const State& q, const Vec2& n, double Vn) const {
    return fluxNormal(q, n) - Vn * q;
}

double Physics::soundSpeed(const State& q) const {
    return std::sqrt(gamma_ * pressure(q) / q(0));
}

double Physics::signalSpeed(const State& q, const Vec2& n) const {
    double c = soundSpeed(q);
    if (kind_ == SystemKind::Euler) return c;
    double rho = q(0), bx = q(4), by = q(5);
    double b2 = (bx * bx + by * by) / (kFourPi * rho);
    double bn2 = (bx * n.x() + by * n.y());
    bn2 = bn2 * bn2 / (kFourPi * rho);
    double a = c * c + b2;
    double disc = std::sqrt(std::max(a * a - 4.0 * c * c * bn2, 0.0));
    double cf = std::sqrt(0.5 * (a + disc));
    return std::max(cf, ch_);
}

double Physics::maxAbsEigenvalue(const State& q) const {
    double vmag = velocity(q).norm();
    double c = soundSpeed(q);
    if (kind_ == SystemKind::Euler) return vmag + c;
    double b2 = (q(4) * q(4) + q(5) * q(5)) / (kFourPi * q(0));
    return std::max(vmag + std::sqrt(c * c + b2), ch_);
}

std::pair<double, double> Physics::eigenEstimatesNormal(const State& ql, const State& qr,
                                                        const Vec2& n, double Vn) const {
    double unl = velocity(ql).dot(n), unr = velocity(qr).dot(n);
    double cl = signalSpeed(ql, n), cr = signalSpeed(qr, n);
    double sl = std::min(unl - cl, unr - cr) - Vn;
    double sr = std::max(unl + cl, unr + cr) - Vn;
    return {sl, sr};
}

}  // namespace alefv
