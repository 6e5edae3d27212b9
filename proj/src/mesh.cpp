#include "alefv/mesh.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace alefv {

namespace {
double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
}  // namespace

void TriMesh::finalize() {
    const int ne = numElements();
    const int nv = numVertices();
    if (periodic && shift.size() != tri.size())
        shift.assign(tri.size(), {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()});

    for (int t = 0; t < ne; ++t) {
        if (signedArea(t) <= 0.0)
            throw SolverError(SolverError::Kind::Geometry,
                              fmt::format("element {} has non-positive area", t));
    }

    neighbor.assign(ne, {-1, -1, -1});
    neighborEdge.assign(ne, {-1, -1, -1});
    std::map<std::pair<int, int>, std::pair<int, int>> open_edges;
    for (int t = 0; t < ne; ++t) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[t][e], b = tri[t][(e + 1) % 3];
            auto key = std::minmax(a, b);
            auto it = open_edges.find(key);
            if (it == open_edges.end()) {
                open_edges[key] = {t, e};
            } else {
                auto [t2, e2] = it->second;
                if (t2 < 0)
                    throw SolverError(SolverError::Kind::Geometry,
                                      "edge shared by more than two elements");
                neighbor[t][e] = t2;
                neighborEdge[t][e] = e2;
                neighbor[t2][e2] = t;
                neighborEdge[t2][e2] = e;
                it->second = {-1, -1};
            }
        }
    }

    faces.clear();
    faceOfEdge.assign(ne, {-1, -1, -1});
    for (int t = 0; t < ne; ++t) {
        for (int e = 0; e < 3; ++e) {
            int nb = neighbor[t][e];
            if (nb >= 0 && (nb < t || (nb == t && neighborEdge[t][e] < e))) continue;
            Face f;
            f.ti = t;
            f.ei = e;
            f.tj = nb;
            f.ej = nb >= 0 ? neighborEdge[t][e] : -1;
            int idx = static_cast<int>(faces.size());
            faceOfEdge[t][e] = idx;
            if (nb >= 0) faceOfEdge[nb][f.ej] = idx;
            faces.push_back(f);
        }
    }

    // Vertex fans via the adjacency walk: around corner c the next triangle
    // counterclockwise lies across local edge (c+2)%3, clockwise across c.
    std::vector<std::vector<std::pair<int, int>>> incident(nv);
    for (int t = 0; t < ne; ++t)
        for (int c = 0; c < 3; ++c) incident[tri[t][c]].push_back({t, c});

    auto localCorner = [&](int t, int v) {
        for (int c = 0; c < 3; ++c)
            if (tri[t][c] == v) return c;
        throw SolverError(SolverError::Kind::Geometry, "adjacency corruption");
    };

    fans.assign(nv, {});
    for (int k = 0; k < nv; ++k) {
        if (incident[k].empty())
            throw SolverError(SolverError::Kind::Geometry,
                              fmt::format("vertex {} has no incident element", k));
        const int count = static_cast<int>(incident[k].size());
        auto [t0, c0] = incident[k][0];
        // Rewind clockwise to a boundary edge (or detect a closed loop).
        int t = t0, c = c0;
        bool closed = false;
        for (int steps = 0; steps <= count; ++steps) {
            int prev = neighbor[t][c];
            if (prev < 0) break;
            int pc = localCorner(prev, k);
            t = prev;
            c = pc;
            if (t == t0 && c == c0) {
                closed = true;
                break;
            }
            if (steps == count)
                throw SolverError(SolverError::Kind::Geometry,
                                  fmt::format("non-manifold vertex {}", k));
        }
        Fan& fan = fans[k];
        fan.closed = closed;
        int tc = t, cc = c;
        for (int steps = 0; steps < count; ++steps) {
            fan.tris.push_back(tc);
            fan.corners.push_back(cc);
            int next = neighbor[tc][(cc + 2) % 3];
            if (next < 0) {
                if (steps + 1 != count)
                    throw SolverError(SolverError::Kind::Geometry,
                                      fmt::format("non-manifold vertex {}", k));
                break;
            }
            int ncorner = localCorner(next, k);
            if (closed && next == t && ncorner == c && steps + 1 != count)
                throw SolverError(SolverError::Kind::Geometry,
                                  fmt::format("non-manifold vertex {}", k));
            tc = next;
            cc = ncorner;
        }
        if (static_cast<int>(fan.tris.size()) != count)
            throw SolverError(SolverError::Kind::Geometry,
                              fmt::format("non-manifold vertex {}", k));
    }
}

ReferenceMap TriMesh::refMap(int t) const {
    ReferenceMap m;
    m.p = cornerPos(t, 0);
    m.A.col(0) = cornerPos(t, 1) - m.p;
    m.A.col(1) = cornerPos(t, 2) - m.p;
    return m;
}

double TriMesh::signedArea(int t) const {
    Vec2 a = cornerPos(t, 0);
    return 0.5 * cross2(cornerPos(t, 1) - a, cornerPos(t, 2) - a);
}

double TriMesh::volume(int t) const {
    double a = signedArea(t);
    if (a <= 0.0)
        throw SolverError(SolverError::Kind::Geometry,
                          fmt::format("element {} degenerate or inverted", t));
    return a;
}

double TriMesh::incircleDiameter(int t) const {
    double a = volume(t);
    double per = edgeVector(t, 0).norm() + edgeVector(t, 1).norm() + edgeVector(t, 2).norm();
    return 4.0 * a / per;
}

double TriMesh::circumDiameter(int t) const {
    double a = volume(t);
    double s = edgeVector(t, 0).norm() * edgeVector(t, 1).norm() * edgeVector(t, 2).norm();
    return s / (2.0 * a);
}

Vec2 TriMesh::centroid(int t) const {
    return (cornerPos(t, 0) + cornerPos(t, 1) + cornerPos(t, 2)) / 3.0;
}

double TriMesh::maxCircumDiameter() const {
    double h = 0.0;
    for (int t = 0; t < numElements(); ++t) h = std::max(h, circumDiameter(t));
    return h;
}

double TriMesh::totalArea() const {
    double a = 0.0;
    for (int t = 0; t < numElements(); ++t) a += signedArea(t);
    return a;
}

void TriMesh::tagBoundary(const std::function<int(const Vec2&, const Vec2&)>& tagOf) {
    for (Face& f : faces) {
        if (f.tj >= 0) continue;
        f.tag = tagOf(cornerPos(f.ti, f.ei), cornerPos(f.ti, (f.ei + 1) % 3));
    }
}

TriMesh makeSplitSquare(int nx, int ny, const Vec2& lo, const Vec2& hi, bool periodicMesh) {
    if (nx < 1 || ny < 1 || (periodicMesh && (nx < 3 || ny < 3)))
        throw SolverError(SolverError::Kind::Config, "split-square resolution too small");
    TriMesh m;
    m.periodic = periodicMesh;
    Vec2 len = hi - lo;
    m.period = periodicMesh ? len : Vec2::Zero();
    int vnx = periodicMesh ? nx : nx + 1;
    int vny = periodicMesh ? ny : ny + 1;
    m.vertex.reserve(static_cast<std::size_t>(vnx) * vny);
    for (int j = 0; j < vny; ++j)
        for (int i = 0; i < vnx; ++i)
            m.vertex.push_back({lo.x() + len.x() * i / nx, lo.y() + len.y() * j / ny});

    auto vid = [&](int i, int j) {
        int ii = periodicMesh ? i % nx : i;
        int jj = periodicMesh ? j % ny : j;
        return jj * vnx + ii;
    };
    auto vshift = [&](int i, int j) -> Vec2 {
        if (!periodicMesh) return Vec2::Zero();
        return {i >= nx ? len.x() : 0.0, j >= ny ? len.y() : 0.0};
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            Vec2 sa = vshift(i, j), sb = vshift(i + 1, j), sc = vshift(i + 1, j + 1),
                 sd = vshift(i, j + 1);
            m.tri.push_back({a, b, c});
            m.shift.push_back({sa, sb, sc});
            m.tri.push_back({a, c, d});
            m.shift.push_back({sa, sc, sd});
        }
    }
    if (!periodicMesh) m.shift.clear();
    m.finalize();
    return m;
}

TriMesh makeDisc(double radius, int nrings) {
    if (nrings < 1 || radius <= 0.0)
        throw SolverError(SolverError::Kind::Config, "bad disc parameters");
    TriMesh m;
    std::vector<std::vector<int>> ring(nrings + 1);
    m.vertex.push_back({0.0, 0.0});
    ring[0] = {0};
    for (int i = 1; i <= nrings; ++i) {
        int n = 6 * i;
        double r = radius * i / nrings;
        for (int k = 0; k < n; ++k) {
            double th = 2.0 * M_PI * k / n;
            ring[i].push_back(static_cast<int>(m.vertex.size()));
            m.vertex.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    for (int k = 0; k < 6; ++k)
        m.tri.push_back({0, ring[1][k], ring[1][(k + 1) % 6]});
    for (int i = 1; i < nrings; ++i) {
        const auto& in = ring[i];
        const auto& out = ring[i + 1];
        int mm = static_cast<int>(in.size()), nn = static_cast<int>(out.size());
        int a = 0, b = 0;
        while (a < mm || b < nn) {
            bool advanceOuter =
                b < nn && (a == mm || double(b + 1) / nn <= double(a + 1) / mm);
            if (advanceOuter) {
                m.tri.push_back({in[a % mm], out[b % nn], out[(b + 1) % nn]});
                ++b;
            } else {
                m.tri.push_back({in[a % mm], out[b % nn], in[(a + 1) % mm]});
                ++a;
            }
        }
    }
    m.finalize();
    return m;
}

TriMesh makePolarSector(double r0, double r1, double theta0, double theta1, int nr,
                        int ntheta) {
    if (nr < 1 || ntheta < 1 || r0 <= 0.0 || r1 <= r0 || theta1 <= theta0)
        throw SolverError(SolverError::Kind::Config, "bad sector parameters");
    TriMesh m;
    auto vid = [&](int i, int j) { return j * (nr + 1) + i; };
    for (int j = 0; j <= ntheta; ++j) {
        double th = theta0 + (theta1 - theta0) * j / ntheta;
        for (int i = 0; i <= nr; ++i) {
            double r = r0 + (r1 - r0) * i / nr;
            m.vertex.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    for (int j = 0; j < ntheta; ++j) {
        for (int i = 0; i < nr; ++i) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            m.tri.push_back({a, b, c});
            m.tri.push_back({a, c, d});
        }
    }
    m.finalize();
    return m;
}

TriMesh readMeshText(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SolverError(SolverError::Kind::Io, "cannot open mesh file " + path);
    int nv = 0, ne = 0;
    if (!(in >> nv >> ne) || nv < 3 || ne < 1)
        throw SolverError(SolverError::Kind::Io, "bad mesh header in " + path);
    TriMesh m;
    m.vertex.resize(nv);
    for (int i = 0; i < nv; ++i)
        if (!(in >> m.vertex[i].x() >> m.vertex[i].y()))
            throw SolverError(SolverError::Kind::Io, "bad vertex line in " + path);
    m.tri.resize(ne);
    for (int t = 0; t < ne; ++t) {
        int a, b, c;
        if (!(in >> a >> b >> c) || a < 1 || b < 1 || c < 1 || a > nv || b > nv || c > nv)
            throw SolverError(SolverError::Kind::Io, "bad element line in " + path);
        m.tri[t] = {a - 1, b - 1, c - 1};
    }
    m.finalize();
    std::map<std::pair<int, int>, int> bface;
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        const auto& fc = m.faces[f];
        if (fc.tj >= 0) continue;
        auto key = std::minmax(m.tri[fc.ti][fc.ei], m.tri[fc.ti][(fc.ei + 1) % 3]);
        bface[key] = static_cast<int>(f);
    }
    int va, vb, tag;
    while (in >> va >> vb >> tag) {
        auto it = bface.find(std::minmax(va - 1, vb - 1));
        if (it == bface.end())
            throw SolverError(SolverError::Kind::Io,
                              fmt::format("{}: {} {} is not a boundary edge", path, va, vb));
        m.faces[it->second].tag = tag;
    }
    return m;
}

void writeMeshText(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverError(SolverError::Kind::Io, "cannot write mesh file " + path);
    out << mesh.numVertices() << ' ' << mesh.numElements() << '\n';
    for (const Vec2& v : mesh.vertex)
        out << fmt::format("{:.17g} {:.17g}\n", v.x(), v.y());
    for (const auto& t : mesh.tri)
        out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    for (const auto& f : mesh.faces)
        if (f.tj < 0 && f.tag >= 0)
            out << mesh.tri[f.ti][f.ei] + 1 << ' ' << mesh.tri[f.ti][(f.ei + 1) % 3] + 1
                << ' ' << f.tag << '\n';
}

}  // namespace alefv
