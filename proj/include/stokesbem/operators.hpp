#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "stokesbem/geom.hpp"
#include "stokesbem/kernels.hpp"
#include "stokesbem/quadrature.hpp"

namespace stokesbem {

enum class OperatorTag { V, K, Kt, W, V_delta, K_delta, V_lame, K_lame, Mass };

// Row/column space of an operator matrix. Vector spaces interleave the
// component fastest: density dof = facet * d + component, trace dof =
// vertex * d + component.
enum class SpaceTag { DensityP0, TraceP1, ScalarP0, ScalarP1 };

enum class Side { Interior, Exterior };

// Piecewise-constant boundary density (discrete H^{-1/2}), facet-major.
struct DensityVector {
    std::string mesh_id;
    Eigen::VectorXd coeffs;
};

// Continuous piecewise-linear boundary trace (discrete H^{1/2}), node-major.
struct TraceVector {
    std::string mesh_id;
    Eigen::VectorXd coeffs;
};

struct OperatorMatrix {
    OperatorTag tag;
    Eigen::MatrixXd matrix;
    SpaceTag row_space;
    SpaceTag col_space;
    KernelParams params;
    std::string mesh_id;
    bool symmetric = false;
};

struct FieldSample {
    Eigen::VectorXd point;
    Eigen::VectorXd u;
    double p = 0.0;
    Side side = Side::Exterior;
};

// Galerkin matrices of the Stokes layer operators.
//   V  : P0 x P0 single layer (E_u), symmetric.
//   K  : P0 test x P1 trial double-layer trace (T_u with n = n(y)).
//   Kt : P0 x P0 averaged single-layer traction (-T_u with n = n(x));
//        coincident blocks of K and Kt vanish identically on flat facets.
//   W  : P1 x P1 hypersingular form, assembled from the Maue-type
//        integration-by-parts identity (see assemble_W below).
OperatorMatrix assemble_V(const BoundaryMesh& mesh, const KernelParams& params,
                          const QuadConfig& quad = {});
OperatorMatrix assemble_K(const BoundaryMesh& mesh, const KernelParams& params,
                          const QuadConfig& quad = {});
OperatorMatrix assemble_Kt(const BoundaryMesh& mesh, const KernelParams& params,
                           const QuadConfig& quad = {});

// Adjoint-pairing realization of Kt (P1 test x P0 trial). Equals the
// transpose of assemble_K up to quadrature error; assembled independently so
// the duality identity <lambda, K phi> = <Kt lambda, phi> is a real check of
// the traction kernel (it fails by sign for the wrong stress convention).
OperatorMatrix assemble_Kt_dual(const BoundaryMesh& mesh, const KernelParams& params,
                                const QuadConfig& quad = {});

// Hypersingular operator via the Guenter-derivative identity: integrating the
// Maue representation of the bilinear form by parts moves all derivatives
// onto the P1 hat functions, leaving the same weakly singular pair integrals
// as V (iint psi and iint r rT / r^d) contracted with constant per-node
// matrices A_u = n grad(hat_u)^T - grad(hat_u) n^T. Symmetric and
// rigid-motion-annihilating by construction; symmetrized once against
// residual quadrature asymmetry.
OperatorMatrix assemble_W(const BoundaryMesh& mesh, const KernelParams& params,
                          const QuadConfig& quad = {});

// Variational realization of W by near-boundary traction sampling: tractions
// of the double-layer field at +-eps offsets of the test quadrature points,
// Richardson-extrapolated to the surface and averaged over both sides.
// `offsets` are fractions of the local facet diameter (first > second > 0).
// Slower and less accurate than assemble_W; kept as an independent
// cross-check. Returns the symmetrized matrix and the pre-symmetrization
// asymmetry max|W - W^T| / max|W|.
struct WOffsetResult {
    OperatorMatrix W;
    double asymmetry = 0.0;
};
WOffsetResult assemble_W_offset(const BoundaryMesh& mesh, const KernelParams& params,
                                std::pair<double, double> offsets = {0.5, 0.25},
                                const QuadConfig& quad = {});

// Scalar Laplace layer operators on the same mesh (P0 x P0 and P0 x P1).
OperatorMatrix assemble_V_delta(const BoundaryMesh& mesh, const QuadConfig& quad = {});
OperatorMatrix assemble_K_delta(const BoundaryMesh& mesh, const QuadConfig& quad = {});

// Lame layer operators. V_lame is assembled directly from E_L; K_lame
// realizes T_L = A T_Delta - A M + (1-A) T_u, with the rotlet part's
// coincident Cauchy principal value reduced by antisymmetrization
// (iint hat M = 1/2 iint (hat(y) - hat(x)) M, weakly singular).
OperatorMatrix assemble_V_lame(const BoundaryMesh& mesh, const KernelParams& params,
                               const QuadConfig& quad = {});
OperatorMatrix assemble_K_lame(const BoundaryMesh& mesh, const KernelParams& params,
                               const QuadConfig& quad = {});

// Duality mass matrices (exact on flat facets), d-component block form.
// Supported pairs: (P0,P0), (P0,P1), (P1,P0), (P1,P1).
OperatorMatrix assemble_mass(const BoundaryMesh& mesh, ShapeSet test, ShapeSet trial);

// One fused traversal producing everything the solvers and verification
// suites need; identical values to the individual assemblers.
struct StokesOperatorSet {
    OperatorMatrix V;
    OperatorMatrix K;
    OperatorMatrix Kt;
    OperatorMatrix W;
    OperatorMatrix V_delta;
    OperatorMatrix K_delta;
    OperatorMatrix M00;
    OperatorMatrix M01;
    OperatorMatrix M11;
    double w_asymmetry = 0.0;
};
StokesOperatorSet assemble_stokes_operators(const BoundaryMesh& mesh,
                                            const KernelParams& params,
                                            const QuadConfig& quad = {});

// Interior/exterior classification by winding number (2D) or signed solid
// angle (3D); throws std::domain_error for points on or numerically
// straddling Gamma.
Side classify_point(const BoundaryMesh& mesh, const Eigen::VectorXd& x);

// Evaluates u = S_u lambda - D_u phi and p = S_p lambda - D_p phi at the
// given points (rows of `points`); an empty coefficient vector stands for a
// missing density/trace. Points closer to a facet than its diameter are
// integrated with graded subdivision; points on Gamma (distance below
// 1e-12 x mesh diameter) are rejected.
std::vector<FieldSample> eval_potentials(const BoundaryMesh& mesh,
                                         const DensityVector& lambda,
                                         const TraceVector& phi,
                                         const Eigen::MatrixXd& points,
                                         const KernelParams& params,
                                         const QuadConfig& quad = {});

// Companion potentials: Laplace (E_Delta/T_Delta), Lame (E_L/T_L), and the
// rotlet potential R phi (double layer with kernel M; lambda must be empty).
// Laplace/Lame samples report p = 0.
enum class AuxKernel { Laplace, Lame, Rotlet };
std::vector<FieldSample> eval_laplace_lame_potentials(
    const BoundaryMesh& mesh, const DensityVector& lambda, const TraceVector& phi,
    const Eigen::MatrixXd& points, const KernelParams& params, AuxKernel which,
    const QuadConfig& quad = {});

// kron(scalar, I_d): lifts a scalar-space matrix to the d-component
// interleaved layout.
Eigen::MatrixXd lift_identity(const Eigen::MatrixXd& scalar, int d);

// Matrix export for fixtures: CSV (17 significant digits) and a small binary
// format ("SBEMMAT1" magic, int64 rows/cols, row-major float64).
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);
void write_matrix_binary(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd read_matrix_binary(const std::string& path);

}  // namespace stokesbem
