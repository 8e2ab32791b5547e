#include "stokesbem/geom.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stokesbem {

namespace {

constexpr double kDegenerateRel = 1e-14;
constexpr double kClosureRel = 1e-10;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string lower_ext(const std::string& path) {
    auto pos = path.find_last_of('.');
    if (pos == std::string::npos) return "";
    std::string ext = path.substr(pos + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::string basename_of(const std::string& path) {
    auto pos = path.find_last_of("/\\");
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

void compute_facet_data(BoundaryMesh& mesh) {
    const int d = mesh.d;
    const int nf = mesh.num_facets();
    mesh.normals.resize(nf, d);
    mesh.measures.resize(nf);
    mesh.centroids.resize(nf, d);
    mesh.diameters.resize(nf);
    for (int f = 0; f < nf; ++f) {
        if (d == 2) {
            Eigen::Vector2d a = mesh.vertices.row(mesh.facets(f, 0));
            Eigen::Vector2d b = mesh.vertices.row(mesh.facets(f, 1));
            Eigen::Vector2d tau = b - a;
            double len = tau.norm();
            mesh.measures(f) = len;
            mesh.diameters(f) = len;
            mesh.centroids.row(f) = 0.5 * (a + b);
            if (len > 0) tau /= len;
            mesh.normals(f, 0) = tau.y();
            mesh.normals(f, 1) = -tau.x();
        } else {
            Eigen::Vector3d a = mesh.vertices.row(mesh.facets(f, 0));
            Eigen::Vector3d b = mesh.vertices.row(mesh.facets(f, 1));
            Eigen::Vector3d c = mesh.vertices.row(mesh.facets(f, 2));
            Eigen::Vector3d cr = (b - a).cross(c - a);
            double two_area = cr.norm();
            mesh.measures(f) = 0.5 * two_area;
            mesh.centroids.row(f) = (a + b + c) / 3.0;
            mesh.diameters(f) =
                std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
            if (two_area > 0) cr /= two_area;
            mesh.normals.row(f) = cr;
        }
    }
}

void check_connectivity(const BoundaryMesh& mesh) {
    const int nf = mesh.num_facets();
    if (mesh.d == 2) {
        // Closed oriented loops: every vertex used once as start, once as end.
        std::map<int, std::pair<int, int>> degree;
        for (int f = 0; f < nf; ++f) {
            degree[mesh.facets(f, 0)].first++;
            degree[mesh.facets(f, 1)].second++;
        }
        for (const auto& [v, deg] : degree)
            if (deg.first != 1 || deg.second != 1)
                fail("mesh '" + mesh.id + "': boundary is not closed at vertex " +
                     std::to_string(v));
        return;
    }
    std::map<std::pair<int, int>, int> directed;
    for (int f = 0; f < nf; ++f) {
        for (int e = 0; e < 3; ++e) {
            int i = mesh.facets(f, e);
            int j = mesh.facets(f, (e + 1) % 3);
            directed[{i, j}]++;
        }
    }
    for (const auto& [edge, count] : directed) {
        if (count != 1)
            fail("mesh '" + mesh.id + "': directed edge repeated; orientation is inconsistent");
        auto rev = directed.find({edge.second, edge.first});
        if (rev == directed.end())
            fail("mesh '" + mesh.id + "': boundary is not closed (unmatched edge)");
    }
}

double enclosed_volume(const BoundaryMesh& mesh) {
    double vol = 0;
    for (int f = 0; f < mesh.num_facets(); ++f)
        vol += mesh.measures(f) * mesh.centroids.row(f).dot(mesh.normals.row(f));
    return vol / mesh.d;
}

}  // namespace

BoundaryMesh finalize_mesh(int d, Eigen::MatrixXd vertices, Eigen::MatrixXi facets,
                           std::string id) {
    if (d != 2 && d != 3) fail("mesh '" + id + "': dimension must be 2 or 3");
    if (vertices.cols() != d) fail("mesh '" + id + "': vertex array has wrong width");
    if (facets.cols() != d) fail("mesh '" + id + "': facet array has wrong width");
    if (facets.rows() == 0) fail("mesh '" + id + "': no facets");
    const int nv = static_cast<int>(vertices.rows());
    for (int f = 0; f < facets.rows(); ++f)
        for (int k = 0; k < d; ++k)
            if (facets(f, k) < 0 || facets(f, k) >= nv)
                fail("mesh '" + id + "': facet references vertex out of range");

    BoundaryMesh mesh;
    mesh.d = d;
    mesh.vertices = std::move(vertices);
    mesh.facets = std::move(facets);
    mesh.id = std::move(id);
    compute_facet_data(mesh);

    double mean = mesh.measures.mean();
    for (int f = 0; f < mesh.num_facets(); ++f)
        if (mesh.measures(f) < kDegenerateRel * mean)
            fail("mesh '" + mesh.id + "': degenerate facet " + std::to_string(f));

    check_connectivity(mesh);

    if (enclosed_volume(mesh) < 0) {
        std::cerr << "warning: mesh '" << mesh.id
                  << "' has inward orientation; flipping all facets\n";
        mesh.facets.col(0).swap(mesh.facets.col(1));
        compute_facet_data(mesh);
    }

    double closure = (mesh.normals.array().colwise() * mesh.measures.array())
                         .colwise()
                         .sum()
                         .matrix()
                         .norm();
    if (closure > kClosureRel * mesh.total_measure())
        fail("mesh '" + mesh.id + "': closure defect too large");
    return mesh;
}

GeometricMoments geometric_moments(const BoundaryMesh& mesh) {
    GeometricMoments gm;
    gm.surface = mesh.total_measure();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(mesh.d);
    for (int f = 0; f < mesh.num_facets(); ++f)
        c += mesh.measures(f) * mesh.centroids.row(f).transpose();
    c /= gm.surface;
    gm.center = c;
    gm.volume = enclosed_volume(mesh);

    const int nv = mesh.num_vertices();
    const int nf = mesh.num_facets();
    gm.m_trace.resize(nv * mesh.d);
    for (int v = 0; v < nv; ++v)
        for (int k = 0; k < mesh.d; ++k)
            gm.m_trace(v * mesh.d + k) = mesh.vertices(v, k) - c(k);
    gm.m_facet.resize(nf * mesh.d);
    for (int f = 0; f < nf; ++f)
        for (int k = 0; k < mesh.d; ++k)
            gm.m_facet(f * mesh.d + k) = mesh.centroids(f, k) - c(k);
    return gm;
}

Eigen::VectorXd RigidMotionBasis::evaluate(int k, const Eigen::VectorXd& x) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    if (k < 0 || k >= m) fail("rigid motion index out of range");
    if (k < d) {
        v(k) = 1.0;
        return v;
    }
    Eigen::VectorXd r = x - center;
    if (d == 2) {
        v(0) = -r(1);
        v(1) = r(0);
    } else {
        Eigen::Vector3d axis = Eigen::Vector3d::Zero();
        axis(k - 3) = 1.0;
        v = axis.cross(Eigen::Vector3d(r));
    }
    return v;
}

RigidMotionBasis rigid_motion_basis(const BoundaryMesh& mesh) {
    GeometricMoments gm = geometric_moments(mesh);
    RigidMotionBasis basis;
    basis.d = mesh.d;
    basis.m = mesh.d == 2 ? 3 : 6;
    basis.center = gm.center;
    const int nv = mesh.num_vertices();
    basis.nodal.resize(basis.m);
    for (int k = 0; k < basis.m; ++k) {
        Eigen::VectorXd trace(nv * mesh.d);
        for (int v = 0; v < nv; ++v) {
            Eigen::VectorXd val = basis.evaluate(k, mesh.vertices.row(v).transpose());
            for (int c = 0; c < mesh.d; ++c) trace(v * mesh.d + c) = val(c);
        }
        basis.nodal[k] = std::move(trace);
    }
    return basis;
}

namespace {

BoundaryMesh load_json2d(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open mesh file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("mesh '" + path + "': invalid JSON (" + e.what() + ")");
    }
    if (!j.contains("dimension") || j["dimension"].get<int>() != 2)
        fail("mesh '" + path + "': expected \"dimension\": 2");
    if (!j.contains("vertices") || !j.contains("loops"))
        fail("mesh '" + path + "': missing \"vertices\" or \"loops\"");

    const auto& jv = j["vertices"];
    Eigen::MatrixXd vertices(jv.size(), 2);
    for (size_t i = 0; i < jv.size(); ++i) {
        if (jv[i].size() != 2) fail("mesh '" + path + "': vertex must have 2 coordinates");
        vertices(static_cast<int>(i), 0) = jv[i][0].get<double>();
        vertices(static_cast<int>(i), 1) = jv[i][1].get<double>();
    }

    std::vector<std::pair<int, int>> segs;
    for (const auto& loop : j["loops"]) {
        if (loop.size() < 3) fail("mesh '" + path + "': loop needs at least 3 vertices");
        for (size_t k = 0; k < loop.size(); ++k) {
            int a = loop[k].get<int>();
            int b = loop[(k + 1) % loop.size()].get<int>();
            segs.emplace_back(a, b);
        }
    }
    Eigen::MatrixXi facets(segs.size(), 2);
    for (size_t s = 0; s < segs.size(); ++s) {
        facets(static_cast<int>(s), 0) = segs[s].first;
        facets(static_cast<int>(s), 1) = segs[s].second;
    }
    return finalize_mesh(2, std::move(vertices), std::move(facets), basename_of(path));
}

// Splits a text stream into meaningful lines (strips comments and blanks).
std::vector<std::string> content_lines(std::istream& in, char comment) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find(comment);
        if (pos != std::string::npos) line.erase(pos);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

BoundaryMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open mesh file '" + path + "'");
    auto lines = content_lines(in, '#');
    if (lines.empty()) fail("mesh '" + path + "': empty OFF file");

    size_t cursor = 0;
    std::istringstream header(lines[cursor]);
    std::string magic;
    header >> magic;
    if (magic != "OFF") fail("mesh '" + path + "': missing OFF header");
    long nv = -1, nf = -1, ne = 0;
    if (!(header >> nv >> nf >> ne)) {
        ++cursor;
        if (cursor >= lines.size()) fail("mesh '" + path + "': truncated OFF file");
        std::istringstream counts(lines[cursor]);
        if (!(counts >> nv >> nf >> ne)) fail("mesh '" + path + "': bad OFF counts");
    }
    ++cursor;
    if (nv <= 0 || nf <= 0) fail("mesh '" + path + "': bad OFF counts");
    if (lines.size() < cursor + static_cast<size_t>(nv + nf))
        fail("mesh '" + path + "': truncated OFF file");

    Eigen::MatrixXd vertices(nv, 3);
    for (long v = 0; v < nv; ++v, ++cursor) {
        std::istringstream ls(lines[cursor]);
        if (!(ls >> vertices(v, 0) >> vertices(v, 1) >> vertices(v, 2)))
            fail("mesh '" + path + "': bad OFF vertex line");
    }
    Eigen::MatrixXi facets(nf, 3);
    for (long f = 0; f < nf; ++f, ++cursor) {
        std::istringstream ls(lines[cursor]);
        int count = 0;
        if (!(ls >> count)) fail("mesh '" + path + "': bad OFF facet line");
        if (count != 3) fail("mesh '" + path + "': only triangle facets are supported");
        if (!(ls >> facets(f, 0) >> facets(f, 1) >> facets(f, 2)))
            fail("mesh '" + path + "': bad OFF facet line");
    }
    return finalize_mesh(3, std::move(vertices), std::move(facets), basename_of(path));
}

int parse_obj_index(const std::string& token, long nv, const std::string& path) {
    std::string head = token.substr(0, token.find('/'));
    long idx = 0;
    try {
        idx = std::stol(head);
    } catch (const std::exception&) {
        fail("mesh '" + path + "': bad OBJ face index '" + token + "'");
    }
    if (idx < 0) idx = nv + idx + 1;
    if (idx < 1 || idx > nv) fail("mesh '" + path + "': OBJ face index out of range");
    return static_cast<int>(idx - 1);
}

BoundaryMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open mesh file '" + path + "'");
    std::vector<Eigen::Vector3d> verts;
    std::vector<std::array<std::string, 3>> face_tokens;
    for (const auto& line : content_lines(in, '#')) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Eigen::Vector3d p;
            if (!(ls >> p.x() >> p.y() >> p.z()))
                fail("mesh '" + path + "': bad OBJ vertex line");
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<std::string> toks;
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (toks.size() != 3)
                fail("mesh '" + path + "': only triangle faces are supported");
            face_tokens.push_back({toks[0], toks[1], toks[2]});
        }
    }
    if (verts.empty() || face_tokens.empty())
        fail("mesh '" + path + "': no geometry found in OBJ file");

    Eigen::MatrixXd vertices(verts.size(), 3);
    for (size_t v = 0; v < verts.size(); ++v) vertices.row(v) = verts[v];
    Eigen::MatrixXi facets(face_tokens.size(), 3);
    long nv = static_cast<long>(verts.size());
    for (size_t f = 0; f < face_tokens.size(); ++f)
        for (int k = 0; k < 3; ++k)
            facets(static_cast<int>(f), k) = parse_obj_index(face_tokens[f][k], nv, path);
    return finalize_mesh(3, std::move(vertices), std::move(facets), basename_of(path));
}

}  // namespace

BoundaryMesh load_mesh(const std::string& path, MeshFormat format) {
    if (format == MeshFormat::Auto) {
        std::string ext = lower_ext(path);
        if (ext == "json") format = MeshFormat::Json2d;
        else if (ext == "off") format = MeshFormat::Off;
        else if (ext == "obj") format = MeshFormat::Obj;
        else fail("cannot infer mesh format of '" + path + "' (use .json/.off/.obj)");
    }
    switch (format) {
        case MeshFormat::Json2d: return load_json2d(path);
        case MeshFormat::Off: return load_off(path);
        case MeshFormat::Obj: return load_obj(path);
        default: fail("unknown mesh format");
    }
}

BoundaryMesh make_circle(int n, double radius, const Eigen::Vector2d& center) {
    if (n < 3) fail("circle mesh needs at least 3 panels");
    Eigen::MatrixXd vertices(n, 2);
    Eigen::MatrixXi facets(n, 2);
    for (int i = 0; i < n; ++i) {
        double theta = 2.0 * M_PI * i / n;
        vertices(i, 0) = center.x() + radius * std::cos(theta);
        vertices(i, 1) = center.y() + radius * std::sin(theta);
        facets(i, 0) = i;
        facets(i, 1) = (i + 1) % n;
    }
    return finalize_mesh(2, std::move(vertices), std::move(facets),
                         "circle:" + std::to_string(n));
}

BoundaryMesh make_icosphere(int level, double radius, const Eigen::Vector3d& center) {
    if (level < 0 || level > 8) fail("icosphere level must be in [0, 8]");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Eigen::Vector3d p = (verts[a] + verts[b]).normalized();
            verts.push_back(p);
            int idx = static_cast<int>(verts.size()) - 1;
            midpoint[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            int ab = mid(f[0], f[1]);
            int bc = mid(f[1], f[2]);
            int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    Eigen::MatrixXd vertices(verts.size(), 3);
    for (size_t v = 0; v < verts.size(); ++v)
        vertices.row(v) = (center + radius * verts[v]).transpose();
    Eigen::MatrixXi facets(faces.size(), 3);
    for (size_t f = 0; f < faces.size(); ++f)
        for (int k = 0; k < 3; ++k) facets(static_cast<int>(f), k) = faces[f][k];
    return finalize_mesh(3, std::move(vertices), std::move(facets),
                         "icosphere:" + std::to_string(faces.size()));
}

BoundaryMesh mesh_from_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string kind = spec.substr(0, colon);
        std::string arg = spec.substr(colon + 1);
        if (kind == "circle" || kind == "icosphere") {
            long n = 0;
            try {
                n = std::stol(arg);
            } catch (const std::exception&) {
                fail("bad mesh spec '" + spec + "'");
            }
            if (kind == "circle") return make_circle(static_cast<int>(n));
            if (n <= 10) return make_icosphere(static_cast<int>(n));
            // Interpret larger numbers as the facet count 20 * 4^level.
            long count = 20;
            int level = 0;
            while (count < n) {
                count *= 4;
                ++level;
            }
            if (count != n)
                fail("icosphere facet count must be 20*4^k, got '" + arg + "'");
            return make_icosphere(level);
        }
    }
    return load_mesh(spec);
}

}  // namespace stokesbem
