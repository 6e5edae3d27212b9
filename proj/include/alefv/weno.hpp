#ifndef ALEFV_WENO_HPP
#define ALEFV_WENO_HPP

#include <array>
#include <vector>

#include "alefv/basis.hpp"
#include "alefv/mesh.hpp"

namespace alefv {

// Modal coefficients of one element's reconstruction: modes x variables.
using RecCoeffs =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxModes, kMaxVars>;

struct WenoParams {
    double epsilon = 1e-14;
    double r = 8.0;
    double lambdaCentral = 1e5;
    double lambdaSided = 1.0;
};

// Per-element polynomial WENO reconstruction from cell averages.  Stencil
// topology is built once; the least-squares systems are reassembled from the
// current vertex coordinates on every call.
class WenoReconstructor {
public:
    // A stencil member is an element plus a lattice offset (periodic meshes).
    struct Member {
        int elem;
        int sx = 0, sy = 0;
        bool operator==(const Member&) const = default;
    };
    static constexpr int kStencils = 7;  // central, 3 edge, 3 vertex

    WenoReconstructor(const TriMesh& mesh, int degree, WenoParams params = {});

    int degree() const { return degree_; }
    int modes() const { return modeCount(degree_); }
    int stencilTarget() const { return 2 * modes(); }
    const DubinerBasis& basis() const { return basis_; }
    const std::array<std::vector<Member>, kStencils>& stencils(int elem) const {
        return stencils_[elem];
    }

    // Blend all stencils; out[i] is modes x nvars with row 0 = Q_i.
    void reconstruct(const TriMesh& mesh, const Eigen::MatrixXd& averages,
                     std::vector<RecCoeffs>& out) const;

    // Individual stencil solutions for one element (diagnostics and tests).
    std::array<RecCoeffs, kStencils> stencilSolutions(const TriMesh& mesh,
                                                      const Eigen::MatrixXd& averages,
                                                      int elem) const;

    double oscillationIndicator(const Eigen::Ref<const Eigen::VectorXd>& modal) const;
    Eigen::VectorXd nonlinearWeights(const Eigen::VectorXd& sigma) const;

    // Value of the reconstruction at a reference-frame point of its element.
    static State evaluate(const DubinerBasis& basis, const RecCoeffs& c, double xi,
                          double eta);

private:
    struct ElementTables {
        std::vector<Member> unionMembers;          // excludes the home element
        std::array<std::vector<int>, kStencils> rows;  // indices into unionMembers
    };

    void buildStencils(const TriMesh& mesh);
    void solveElement(const TriMesh& mesh, const Eigen::MatrixXd& averages, int elem,
                      std::array<RecCoeffs, kStencils>* perStencil,
                      RecCoeffs* blended) const;

    int degree_;
    WenoParams params_;
    DubinerBasis basis_;
    std::vector<std::array<std::vector<Member>, kStencils>> stencils_;
    std::vector<ElementTables> tables_;
};

}  // namespace alefv

#endif
