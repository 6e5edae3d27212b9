#ifndef ALEFV_TESTS_ORACLES_HPP
#define ALEFV_TESTS_ORACLES_HPP

// Independent reference solutions used by the tests.  Everything here is
// implemented from first principles, on purpose separately from the library
// code paths it validates.

#include <cmath>
#include <stdexcept>

namespace oracle {

struct Prim1D {
    double rho, u, p;
};

// Exact solution of the 1D Euler Riemann problem (pressure-function Newton
// iteration), sampled at the self-similar coordinate xi = x/t.
class ExactRiemann {
public:
    ExactRiemann(const Prim1D& l, const Prim1D& r, double gamma)
        : l_(l), r_(r), g_(gamma) {
        cl_ = std::sqrt(g_ * l_.p / l_.rho);
        cr_ = std::sqrt(g_ * r_.p / r_.rho);
        if (2.0 * cl_ / (g_ - 1.0) + 2.0 * cr_ / (g_ - 1.0) <= r_.u - l_.u)
            throw std::runtime_error("vacuum generated");
        solveStar();
    }

    double pStar() const { return ps_; }
    double uStar() const { return us_; }

    Prim1D sample(double xi) const {
        if (xi < us_) return sampleSide(l_, cl_, -1.0, xi);
        return sampleSide(r_, cr_, +1.0, xi);
    }

private:
    // f_K(p) and derivative for one side of the pressure function.
    static void sideFun(const Prim1D& s, double c, double g, double p, double& f,
                        double& fd) {
        if (p > s.p) {  // shock
            double A = 2.0 / ((g + 1.0) * s.rho);
            double B = (g - 1.0) / (g + 1.0) * s.p;
            double q = std::sqrt(A / (p + B));
            f = (p - s.p) * q;
            fd = q * (1.0 - 0.5 * (p - s.p) / (p + B));
        } else {  // rarefaction
            f = 2.0 * c / (g - 1.0) * (std::pow(p / s.p, (g - 1.0) / (2.0 * g)) - 1.0);
            fd = 1.0 / (s.rho * c) * std::pow(p / s.p, -(g + 1.0) / (2.0 * g));
        }
    }

    void solveStar() {
        double p = std::max(1e-12, 0.5 * (l_.p + r_.p) -
                                       0.125 * (r_.u - l_.u) * (l_.rho + r_.rho) *
                                           (cl_ + cr_));
        for (int it = 0; it < 100; ++it) {
            double fl, fld, fr, frd;
            sideFun(l_, cl_, g_, p, fl, fld);
            sideFun(r_, cr_, g_, p, fr, frd);
            double step = (fl + fr + r_.u - l_.u) / (fld + frd);
            double pn = p - step;
            if (pn <= 0.0) pn = 0.5 * p;
            if (std::abs(pn - p) < 1e-14 * (p + 1e-30)) {
                p = pn;
                break;
            }
            p = pn;
        }
        ps_ = p;
        double fl, fld, fr, frd;
        sideFun(l_, cl_, g_, p, fl, fld);
        sideFun(r_, cr_, g_, p, fr, frd);
        us_ = 0.5 * (l_.u + r_.u) + 0.5 * (fr - fl);
    }

    // sgn = -1 for the left wave, +1 for the right wave.
    Prim1D sampleSide(const Prim1D& s, double c, double sgn, double xi) const {
        double g = g_;
        if (ps_ > s.p) {  // shock
            double ms = std::sqrt((g + 1.0) / (2.0 * g) * ps_ / s.p +
                                  (g - 1.0) / (2.0 * g));
            double sspd = s.u + sgn * c * ms;
            if (sgn * (xi - sspd) >= 0.0) return s;
            double rr = s.rho * ((ps_ / s.p + (g - 1.0) / (g + 1.0)) /
                                 ((g - 1.0) / (g + 1.0) * ps_ / s.p + 1.0));
            return {rr, us_, ps_};
        }
        double cs = c * std::pow(ps_ / s.p, (g - 1.0) / (2.0 * g));
        double head = s.u + sgn * c;
        double tail = us_ + sgn * cs;
        if (sgn * (xi - head) >= 0.0) return s;
        if (sgn * (xi - tail) <= 0.0)
            return {s.rho * std::pow(ps_ / s.p, 1.0 / g), us_, ps_};
        double cf = 2.0 / (g + 1.0) * (c - sgn * (s.u - xi) * (g - 1.0) / 2.0);
        double uf = 2.0 / (g + 1.0) * (-sgn * c + (g - 1.0) / 2.0 * s.u + xi);
        return {s.rho * std::pow(cf / c, 2.0 / (g - 1.0)), uf,
                s.p * std::pow(cf / c, 2.0 * g / (g - 1.0))};
    }

    Prim1D l_, r_;
    double g_, cl_, cr_, ps_, us_;
};

}  // namespace oracle

#endif
