#ifndef ALEFV_TYPES_HPP
#define ALEFV_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace alefv {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

// Conserved state vector: 4 components (Euler) or 7 (augmented MHD).
// Fixed capacity avoids heap traffic in the hot loops.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 7, 1>;

constexpr int kMaxVars = 7;
constexpr int kMaxDegree = 3;                    // scheme orders 1..4
constexpr int kMaxModes = 10;                    // (M+1)(M+2)/2 at M=3

inline int modeCount(int degree) { return (degree + 1) * (degree + 2) / 2; }

class SolverError : public std::runtime_error {
public:
    enum class Kind { Config, Admissibility, Geometry, Predictor, Solver, Io };
    SolverError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

}  // namespace alefv

#endif
