#include "alefv/basis.hpp"

#include <cmath>
#include <map>

namespace alefv {

double Poly2::eval(double xi, double eta) const {
    // Horner in eta inside plain accumulation in xi; degrees are tiny.
    double result = 0.0;
    double xp = 1.0;
    for (int a = 0; a <= deg_; ++a) {
        double inner = 0.0;
        for (int b = deg_ - a; b >= 0; --b) inner = inner * eta + coeff_(a, b);
        result += xp * inner;
        xp *= xi;
    }
    return result;
}

Poly2 Poly2::dXi() const {
    Poly2 d(std::max(deg_ - 1, 0));
    for (int a = 1; a <= deg_; ++a)
        for (int b = 0; b + a <= deg_; ++b) d.c(a - 1, b) += a * coeff_(a, b);
    return d;
}

Poly2 Poly2::dEta() const {
    Poly2 d(std::max(deg_ - 1, 0));
    for (int a = 0; a <= deg_; ++a)
        for (int b = 1; b + a <= deg_; ++b) d.c(a, b - 1) += b * coeff_(a, b);
    return d;
}

Poly2 Poly2::operator*(const Poly2& other) const {
    Poly2 p(deg_ + other.deg_);
    for (int a = 0; a <= deg_; ++a)
        for (int b = 0; a + b <= deg_; ++b) {
            if (coeff_(a, b) == 0.0) continue;
            for (int c = 0; c <= other.deg_; ++c)
                for (int d = 0; c + d <= other.deg_; ++d)
                    p.c(a + c, b + d) += coeff_(a, b) * other.c(c, d);
        }
    return p;
}

Poly2& Poly2::operator+=(const Poly2& other) {
    if (other.deg_ > deg_) {
        Poly2 grown(other.deg_);
        for (int a = 0; a <= deg_; ++a)
            for (int b = 0; a + b <= deg_; ++b) grown.c(a, b) = coeff_(a, b);
        *this = grown;
    }
    for (int a = 0; a <= other.deg_; ++a)
        for (int b = 0; a + b <= other.deg_; ++b) coeff_(a, b) += other.c(a, b);
    return *this;
}

Poly2& Poly2::scale(double s) {
    coeff_ *= s;
    return *this;
}

double Poly2::integrateRef() const {
    double sum = 0.0;
    for (int a = 0; a <= deg_; ++a)
        for (int b = 0; a + b <= deg_; ++b)
            if (coeff_(a, b) != 0.0) sum += coeff_(a, b) * triangleMoment(a, b);
    return sum;
}

double triangleMoment(int a, int b) {
    // a! b! / (a+b+2)!
    double value = 1.0;
    // 1/( (a+1)(a+2)...(a+b+2) ) * b! arranged to stay well-scaled
    for (int k = 1; k <= b; ++k) value *= k;
    for (int k = a + 1; k <= a + b + 2; ++k) value /= k;
    return value;
}

QuadRule1D gaussLegendre01(int n) {
    QuadRule1D r;
    auto add = [&r](double x, double w) {
        r.points.push_back(0.5 * (x + 1.0));
        r.weights.push_back(0.5 * w);
    };
    switch (n) {
        case 1:
            add(0.0, 2.0);
            break;
        case 2: {
            const double x = 1.0 / std::sqrt(3.0);
            add(-x, 1.0);
            add(x, 1.0);
            break;
        }
        case 3: {
            const double x = std::sqrt(3.0 / 5.0);
            add(-x, 5.0 / 9.0);
            add(0.0, 8.0 / 9.0);
            add(x, 5.0 / 9.0);
            break;
        }
        case 4: {
            const double x1 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double x2 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double w1 = (18.0 + std::sqrt(30.0)) / 36.0;
            const double w2 = (18.0 - std::sqrt(30.0)) / 36.0;
            add(-x2, w2);
            add(-x1, w1);
            add(x1, w1);
            add(x2, w2);
            break;
        }
        case 5: {
            const double x1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double x2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double w0 = 128.0 / 225.0;
            const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
            const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
            add(-x2, w2);
            add(-x1, w1);
            add(0.0, w0);
            add(x1, w1);
            add(x2, w2);
            break;
        }
        default:
            throw SolverError(SolverError::Kind::Config, "gaussLegendre01: n out of range");
    }
    return r;
}

QuadRule1D gaussLobatto01(int n) {
    QuadRule1D r;
    auto add = [&r](double x, double w) {
        r.points.push_back(0.5 * (x + 1.0));
        r.weights.push_back(0.5 * w);
    };
    switch (n) {
        case 1:
            // degenerate single node at tau=0 (first-order scheme)
            r.points = {0.0};
            r.weights = {1.0};
            break;
        case 2:
            add(-1.0, 1.0);
            add(1.0, 1.0);
            break;
        case 3:
            add(-1.0, 1.0 / 3.0);
            add(0.0, 4.0 / 3.0);
            add(1.0, 1.0 / 3.0);
            break;
        case 4: {
            const double x = 1.0 / std::sqrt(5.0);
            add(-1.0, 1.0 / 6.0);
            add(-x, 5.0 / 6.0);
            add(x, 5.0 / 6.0);
            add(1.0, 1.0 / 6.0);
            break;
        }
        case 5: {
            const double x = std::sqrt(3.0 / 7.0);
            add(-1.0, 0.1);
            add(-x, 49.0 / 90.0);
            add(0.0, 32.0 / 45.0);
            add(x, 49.0 / 90.0);
            add(1.0, 0.1);
            break;
        }
        default:
            throw SolverError(SolverError::Kind::Config, "gaussLobatto01: n out of range");
    }
    return r;
}

namespace {

TriQuadRule makeTriRule(int exactness) {
    TriQuadRule rule;
    rule.exactness = exactness;
    auto addCentroid = [&rule](double w) {
        rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
        rule.weights.push_back(0.5 * w);
    };
    // Permutations of barycentric (1-2a, a, a) mapped to (xi,eta).
    auto addPerm3 = [&rule](double a, double w) {
        const double b = 1.0 - 2.0 * a;
        rule.points.emplace_back(b, a);
        rule.points.emplace_back(a, b);
        rule.points.emplace_back(a, a);
        for (int k = 0; k < 3; ++k) rule.weights.push_back(0.5 * w);
    };
    auto addPerm6 = [&rule](double a, double b, double w) {
        const double c = 1.0 - a - b;
        const double xs[6] = {a, a, b, b, c, c};
        const double ys[6] = {b, c, a, c, a, b};
        for (int k = 0; k < 6; ++k) {
            rule.points.emplace_back(xs[k], ys[k]);
            rule.weights.push_back(0.5 * w);
        }
    };

    switch (exactness) {
        case 1:
            addCentroid(1.0);
            break;
        case 2:
            addPerm3(1.0 / 6.0, 1.0 / 3.0);
            break;
        case 4:
            addPerm3(0.445948490915965, 0.223381589678011);
            addPerm3(0.091576213509771, 0.109951743655322);
            break;
        case 5:
            addCentroid(0.225);
            addPerm3(0.470142064105115, 0.132394152788506);
            addPerm3(0.101286507323456, 0.125939180544827);
            break;
        case 8:
            addCentroid(0.14431560767778716825);
            addPerm3(0.45929258829272315603, 0.095091634267284624794);
            addPerm3(0.17056930775176020662, 0.10321737053471825028);
            addPerm3(0.050547228317030975458, 0.032458497623198080311);
            addPerm6(0.0083947774099576053372, 0.26311282963463811342,
                     0.027230314174434994265);
            break;
        default:
            throw SolverError(SolverError::Kind::Config, "triangleQuadrature: no such rule");
    }
    return rule;
}

}  // namespace

const TriQuadRule& triangleQuadrature(int degree) {
    static const std::map<int, TriQuadRule> rules = {
        {1, makeTriRule(1)}, {2, makeTriRule(2)}, {4, makeTriRule(4)},
        {5, makeTriRule(5)}, {8, makeTriRule(8)},
    };
    for (const auto& [deg, rule] : rules)
        if (deg >= degree) return rule;
    throw SolverError(SolverError::Kind::Config, "triangleQuadrature: degree too high");
}

DubinerBasis::DubinerBasis(int degree) : degree_(degree) {
    // Monomials ordered by total degree.
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) mono_exp_.push_back({a, d - a});
    const int n = static_cast<int>(mono_exp_.size());

    // Gram-Schmidt with exact moments; degree <= 3 keeps this well conditioned.
    std::vector<Poly2> mono(n);
    for (int i = 0; i < n; ++i) {
        mono[i] = Poly2(mono_exp_[i][0] + mono_exp_[i][1]);
        mono[i].c(mono_exp_[i][0], mono_exp_[i][1]) = 1.0;
    }
    funcs_.resize(n);
    for (int i = 0; i < n; ++i) {
        Poly2 p = mono[i];
        for (int j = 0; j < i; ++j) {
            const double proj = (funcs_[j] * mono[i]).integrateRef() /
                                (funcs_[j] * funcs_[j]).integrateRef();
            Poly2 sub = funcs_[j];
            sub.scale(-proj);
            p += sub;
        }
        const double norm2 = (p * p).integrateRef();
        p.scale(1.0 / std::sqrt(2.0 * norm2));
        // sign: make the coefficient of the generating monomial positive
        if (p.c(mono_exp_[i][0], mono_exp_[i][1]) < 0.0) p.scale(-1.0);
        funcs_[i] = p;
    }

    mono_coeff_.setZero(n, n);
    for (int l = 0; l < n; ++l) {
        const Poly2& fl = funcs_[l];
        for (int j = 0; j < n; ++j) mono_coeff_(l, j) = fl.c(mono_exp_[j][0], mono_exp_[j][1]);
    }

    // Oscillation indicator matrix over derivative orders 1..M.
    sigma_.setZero(n, n);
    std::vector<std::vector<Poly2>> derivs(n);
    for (int l = 0; l < n; ++l) {
        for (int al = 0; al <= degree; ++al)
            for (int bl = 0; al + bl <= degree; ++bl) {
                if (al + bl < 1) continue;
                Poly2 d = funcs_[l];
                for (int k = 0; k < al; ++k) d = d.dXi();
                for (int k = 0; k < bl; ++k) d = d.dEta();
                derivs[l].push_back(d);
            }
    }
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
            double s = 0.0;
            for (size_t k = 0; k < derivs[l].size(); ++k)
                s += (derivs[l][k] * derivs[m][k]).integrateRef();
            sigma_(l, m) = s;
        }
}

void DubinerBasis::averagesOverAffineImage(const Vec2& p, const Mat2& A,
                                           Eigen::Ref<Eigen::VectorXd> row) const {
    // Monomial cell averages over the image triangle, pulled back to the
    // reference element: avg of (p + A z)^mono with z on T_e.
    const TriQuadRule& q = triangleQuadrature(std::max(degree_, 1));
    const int n = static_cast<int>(mono_exp_.size());
    Eigen::Matrix<double, kMaxModes, 1> m;
    m.setZero();
    for (size_t k = 0; k < q.points.size(); ++k) {
        const Vec2 xi = p + A * q.points[k];
        double px[kMaxDegree + 1], py[kMaxDegree + 1];
        px[0] = py[0] = 1.0;
        for (int d = 1; d <= degree_; ++d) {
            px[d] = px[d - 1] * xi.x();
            py[d] = py[d - 1] * xi.y();
        }
        for (int j = 0; j < n; ++j)
            m(j) += q.weights[k] * px[mono_exp_[j][0]] * py[mono_exp_[j][1]];
    }
    m.head(n) *= 2.0;  // quadrature weights sum to 1/2; averages need 1/|T_e|
    row.head(n) = mono_coeff_ * m.head(n);
}

TriNodalBasis::TriNodalBasis(int degree) : degree_(degree) {
    if (degree == 0) {
        nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    } else {
        for (int j = 0; j <= degree; ++j)
            for (int i = 0; i + j <= degree; ++i)
                nodes_.emplace_back(double(i) / degree, double(j) / degree);
    }
    const int n = static_cast<int>(nodes_.size());

    DubinerBasis modal(degree);
    Eigen::MatrixXd V(n, n);
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) V(l, m) = modal.eval(m, nodes_[l].x(), nodes_[l].y());
    const Eigen::MatrixXd Vinv = V.inverse();

    funcs_.resize(n);
    for (int l = 0; l < n; ++l) {
        Poly2 p(degree);
        for (int m = 0; m < n; ++m) {
            Poly2 term = modal.poly(m);
            term.scale(Vinv(m, l));
            p += term;
        }
        funcs_[l] = p;
    }

    dxi_.resize(n, n);
    deta_.resize(n, n);
    for (int l = 0; l < n; ++l) {
        for (int m = 0; m < n; ++m) {
            dxi_(l, m) = funcs_[m].dXi().eval(nodes_[l].x(), nodes_[l].y());
            deta_(l, m) = funcs_[m].dEta().eval(nodes_[l].x(), nodes_[l].y());
        }
    }
}

void TriNodalBasis::evalAll(double xi, double eta, Eigen::Ref<Eigen::VectorXd> vals) const {
    for (int l = 0; l < size(); ++l) vals(l) = funcs_[l].eval(xi, eta);
}

}  // namespace alefv
