#ifndef ALEFV_IO_HPP
#define ALEFV_IO_HPP

#include <map>
#include <string>

#include "alefv/mesh.hpp"
#include "alefv/physics.hpp"

namespace alefv {

// Legacy unstructured-grid text snapshot: points, triangles, cell data for
// every conserved variable plus derived primitives.  Readable back for
// bit-exact regression of the conserved averages.
void writeSnapshot(const TriMesh& mesh, const Physics& phys,
                   const Eigen::MatrixXd& averages, const std::string& path);

struct Snapshot {
    TriMesh mesh;                // vertex/tri only (finalize() not called)
    Eigen::MatrixXd averages;    // NE x nvars conserved
};
Snapshot readSnapshot(const std::string& path, int numVars);

// Radial scatter profile: lines "r,rho" of cell centroid radius and density,
// sorted by radius.
void writeRadialProfile(const TriMesh& mesh, const Eigen::MatrixXd& averages,
                        const std::string& path);

// Plot-ready CSV table: header row then one line per record.
void writeCsv(const std::string& path, const std::string& header,
              const std::vector<std::vector<double>>& rows);

}  // namespace alefv

#endif
