#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace stokesbem {

// Discretized closed boundary: straight panels (d=2) or flat triangles (d=3)
// with consistent outward orientation. Immutable after construction.
struct BoundaryMesh {
    int d = 0;
    Eigen::MatrixXd vertices;   // nv x d
    Eigen::MatrixXi facets;     // nf x d vertex indices
    Eigen::MatrixXd normals;    // nf x d, unit outward
    Eigen::VectorXd measures;   // nf, length/area
    Eigen::MatrixXd centroids;  // nf x d
    Eigen::VectorXd diameters;  // nf, max edge length (= measure in 2D)
    std::string id;

    int num_vertices() const { return static_cast<int>(vertices.rows()); }
    int num_facets() const { return static_cast<int>(facets.rows()); }
    double total_measure() const { return measures.sum(); }
};

struct GeometricMoments {
    Eigen::VectorXd center;   // c_Gamma, surface-measure center of mass
    Eigen::VectorXd m_trace;  // nodal values of m(x) = x - c_Gamma, node-major
    Eigen::VectorXd m_facet;  // centroid values of m, facet-major
    double volume = 0;        // |Omega_-| = (1/d) int m.n
    double surface = 0;       // |Gamma|
};

struct RigidMotionBasis {
    int d = 0;
    int m = 0;  // 3 (d=2) or 6 (d=3)
    Eigen::VectorXd center;                // rotations centered here (c_Gamma)
    std::vector<Eigen::VectorXd> nodal;    // m trace vectors, node-major interleaved
    // Pointwise evaluation of basis field k at x.
    Eigen::VectorXd evaluate(int k, const Eigen::VectorXd& x) const;
};

enum class MeshFormat { Auto, Json2d, Off, Obj };

// Throws std::runtime_error on parse failure, open boundary, or degenerate
// facets; flips orientation (with a stderr warning) if enclosed volume < 0.
BoundaryMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto);

// Builds facet data from raw vertices/facets and checks all mesh invariants.
BoundaryMesh finalize_mesh(int d, Eigen::MatrixXd vertices, Eigen::MatrixXi facets,
                           std::string id);

GeometricMoments geometric_moments(const BoundaryMesh& mesh);

RigidMotionBasis rigid_motion_basis(const BoundaryMesh& mesh);

// Built-in generators for convergence studies.
BoundaryMesh make_circle(int n, double radius = 1.0,
                         const Eigen::Vector2d& center = Eigen::Vector2d::Zero());
BoundaryMesh make_icosphere(int level, double radius = 1.0,
                            const Eigen::Vector3d& center = Eigen::Vector3d::Zero());
// Parses "circle:64" / "icosphere:2" generator tokens, else loads from file.
BoundaryMesh mesh_from_spec(const std::string& spec);

}  // namespace stokesbem
