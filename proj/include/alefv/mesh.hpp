#ifndef ALEFV_MESH_HPP
#define ALEFV_MESH_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "alefv/types.hpp"

namespace alefv {

// Affine map from the reference triangle onto one physical triangle.
struct ReferenceMap {
    Vec2 p;   // image of (0,0)
    Mat2 A;   // columns: images of the xi / eta unit steps

    Vec2 toPhys(const Vec2& xi) const { return p + A * xi; }
    Vec2 toRef(const Vec2& x) const { return A.inverse() * (x - p); }
    double jacobian() const { return A.determinant(); }
};

// Unstructured conforming triangulation, optionally periodic (torus).  For
// periodic meshes each triangle corner carries a constant lattice shift so
// that corner positions are always geometrically contiguous within the
// triangle even across the seam.
class TriMesh {
public:
    struct Face {
        int ti, ei;      // owner element and its local edge (verts ei, ei+1)
        int tj, ej;      // neighbor, or tj = -1 on the boundary
        int tag = -1;    // boundary-condition tag for boundary faces
    };
    struct Fan {
        std::vector<int> tris;     // counterclockwise around the vertex
        std::vector<int> corners;  // local index of the center vertex in each
        bool closed = false;
    };

    std::vector<Vec2> vertex;
    std::vector<std::array<int, 3>> tri;
    std::vector<std::array<Vec2, 3>> shift;  // empty unless periodic

    // Built by finalize().
    std::vector<std::array<int, 3>> neighbor;      // -1 across boundary edges
    std::vector<std::array<int, 3>> neighborEdge;
    std::vector<std::array<int, 3>> faceOfEdge;    // face index per (tri, edge)
    std::vector<Face> faces;
    std::vector<Fan> fans;

    double time = 0.0;
    bool periodic = false;
    Vec2 period{0.0, 0.0};

    int numVertices() const { return static_cast<int>(vertex.size()); }
    int numElements() const { return static_cast<int>(tri.size()); }

    // Validates orientation, builds adjacency, faces, and vertex fans.
    void finalize();

    Vec2 cornerPos(int t, int c) const {
        const Vec2& v = vertex[tri[t][c]];
        return periodic ? Vec2(v + shift[t][c]) : v;
    }
    ReferenceMap refMap(int t) const;
    double signedArea(int t) const;
    double volume(int t) const;             // throws on non-positive area
    double incircleDiameter(int t) const;   // 4 A / perimeter
    double circumDiameter(int t) const;
    Vec2 centroid(int t) const;
    double maxCircumDiameter() const;
    double totalArea() const;

    // Outward edge vector queries (counterclockwise element orientation).
    Vec2 edgeVector(int t, int e) const { return cornerPos(t, (e + 1) % 3) - cornerPos(t, e); }
    Vec2 outwardNormal(int t, int e) const {  // length = edge length
        Vec2 d = edgeVector(t, e);
        return {d.y(), -d.x()};
    }

    // Position of a corner of fan triangle `t` as seen from the fan around
    // vertex whose local index in t is `cCenter` (undoes the periodic shift).
    Vec2 cornerPosAround(int t, int c, int cCenter) const {
        Vec2 x = cornerPos(t, c);
        return periodic ? Vec2(x - shift[t][cCenter]) : x;
    }

    bool isBoundaryVertex(int k) const { return !fans[k].closed; }

    // Assign tags to boundary faces from the face midpoint at build time.
    void tagBoundary(const std::function<int(const Vec2&, const Vec2&)>& tagOf);
};

// Structured generators.  All produce counterclockwise triangles and call
// finalize().
TriMesh makeSplitSquare(int nx, int ny, const Vec2& lo, const Vec2& hi,
                        bool periodicMesh = false);
TriMesh makeDisc(double radius, int nrings);
TriMesh makePolarSector(double r0, double r1, double theta0, double theta1,
                        int nr, int ntheta);

// Plain-text mesh IO: header `NV NE`, NV coordinate lines, NE 1-based
// connectivity lines, optional `va vb tag` boundary-edge lines.
TriMesh readMeshText(const std::string& path);
void writeMeshText(const TriMesh& mesh, const std::string& path);

}  // namespace alefv

#endif
