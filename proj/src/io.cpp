#include "alefv/io.hpp"

#include <algorithm>
#include <fstream>
#include <vector>

#include <fmt/format.h>
#include <fmt/os.h>

namespace alefv {

namespace {

std::vector<std::string> conservedNames(int numVars) {
    std::vector<std::string> n = {"rho", "mom_x", "mom_y", "energy"};
    if (numVars == 7) {
        n.push_back("B_x");
        n.push_back("B_y");
        n.push_back("psi");
    }
    return n;
}

}  // namespace

void writeSnapshot(const TriMesh& mesh, const Physics& phys,
                   const Eigen::MatrixXd& averages, const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw SolverError(SolverError::Kind::Io,
                          fmt::format("cannot open '{}' for writing", path));
    const int nv = mesh.numVertices(), ne = mesh.numElements();
    f << "# vtk DataFile Version 3.0\n";
    f << fmt::format("snapshot t={:.17g}\n", mesh.time);
    f << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    f << fmt::format("POINTS {} double\n", nv);
    for (const Vec2& v : mesh.vertex)
        f << fmt::format("{:.17g} {:.17g} 0\n", v.x(), v.y());
    f << fmt::format("CELLS {} {}\n", ne, 4 * ne);
    for (const auto& t : mesh.tri)
        f << fmt::format("3 {} {} {}\n", t[0], t[1], t[2]);
    f << fmt::format("CELL_TYPES {}\n", ne);
    for (int i = 0; i < ne; ++i) f << "5\n";

    f << fmt::format("CELL_DATA {}\n", ne);
    auto scalar = [&](const std::string& name, auto&& value) {
        f << fmt::format("SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
        for (int i = 0; i < ne; ++i) f << fmt::format("{:.17g}\n", value(i));
    };
    std::vector<std::string> names = conservedNames(phys.numVars());
    for (int k = 0; k < phys.numVars(); ++k)
        scalar(names[k], [&](int i) { return averages(i, k); });
    // Derived primitives (not part of the round trip).
    scalar("u", [&](int i) { return averages(i, 1) / averages(i, 0); });
    scalar("v", [&](int i) { return averages(i, 2) / averages(i, 0); });
    scalar("pressure", [&](int i) {
        return phys.pressure(State(averages.row(i).transpose()));
    });
    if (!f)
        throw SolverError(SolverError::Kind::Io,
                          fmt::format("write to '{}' failed", path));
}

Snapshot readSnapshot(const std::string& path, int numVars) {
    std::ifstream f(path);
    if (!f)
        throw SolverError(SolverError::Kind::Io,
                          fmt::format("cannot open '{}'", path));
    Snapshot snap;
    std::string tok;
    auto fail = [&](const std::string& why) {
        throw SolverError(SolverError::Kind::Io,
                          fmt::format("'{}': {}", path, why));
    };
    int nv = -1, ne = -1;
    while (f >> tok) {
        if (tok == "POINTS") {
            f >> nv >> tok;
            snap.mesh.vertex.resize(nv);
            for (int i = 0; i < nv; ++i) {
                double x, y, z;
                f >> x >> y >> z;
                snap.mesh.vertex[i] = Vec2(x, y);
            }
        } else if (tok == "CELLS") {
            int total;
            f >> ne >> total;
            snap.mesh.tri.resize(ne);
            for (int i = 0; i < ne; ++i) {
                int n, a, b, c;
                f >> n >> a >> b >> c;
                if (n != 3) fail("non-triangle cell");
                snap.mesh.tri[i] = {a, b, c};
            }
            snap.averages.resize(ne, numVars);
        } else if (tok == "SCALARS") {
            std::string name;
            f >> name >> tok >> tok;  // type, component count
            f >> tok;                 // LOOKUP_TABLE
            f >> tok;                 // default
            std::vector<std::string> names = conservedNames(numVars);
            int col = -1;
            for (int k = 0; k < numVars; ++k)
                if (names[k] == name) col = k;
            for (int i = 0; i < ne; ++i) {
                double v;
                f >> v;
                if (col >= 0) snap.averages(i, col) = v;
            }
        }
    }
    if (nv < 0 || ne < 0) fail("missing POINTS or CELLS section");
    return snap;
}

void writeRadialProfile(const TriMesh& mesh, const Eigen::MatrixXd& averages,
                        const std::string& path) {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(mesh.numElements());
    for (int i = 0; i < mesh.numElements(); ++i)
        rows.emplace_back(mesh.centroid(i).norm(), averages(i, 0));
    std::sort(rows.begin(), rows.end());
    std::ofstream f(path);
    if (!f)
        throw SolverError(SolverError::Kind::Io,
                          fmt::format("cannot open '{}' for writing", path));
    f << "r,rho\n";
    for (const auto& [r, rho] : rows) f << fmt::format("{:.12g},{:.12g}\n", r, rho);
}

void writeCsv(const std::string& path, const std::string& header,
              const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path);
    if (!f)
        throw SolverError(SolverError::Kind::Io,
                          fmt::format("cannot open '{}' for writing", path));
    f << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            f << fmt::format("{}{:.12g}", i ? "," : "", row[i]);
        f << "\n";
    }
}

}  // namespace alefv
