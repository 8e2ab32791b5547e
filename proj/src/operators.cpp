#include "stokesbem/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace stokesbem {

namespace {

using quaddetail::Block;
using quaddetail::Panel;

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;
template <int D>
using Mat = Eigen::Matrix<double, D, D>;

template <typename F2, typename F3>
auto dispatch_dim(int d, F2&& f2, F3&& f3) {
    if (d == 2) return f2();
    if (d == 3) return f3();
    throw std::invalid_argument("operators: dimension must be 2 or 3");
}

void require_compatible(const BoundaryMesh& mesh, const KernelParams& params) {
    params.validate();
    if (params.d != mesh.d)
        throw std::invalid_argument("operators: params.d does not match mesh dimension");
    if (mesh.num_facets() == 0)
        throw std::invalid_argument("operators: mesh has no facets");
}

OperatorMatrix make_op(OperatorTag tag, Eigen::MatrixXd m, SpaceTag rows, SpaceTag cols,
                       const KernelParams& params, const BoundaryMesh& mesh, bool sym) {
    OperatorMatrix op;
    op.tag = tag;
    op.matrix = std::move(m);
    op.row_space = rows;
    op.col_space = cols;
    op.params = params;
    op.mesh_id = mesh.id;
    op.symmetric = sym;
    return op;
}

template <int D>
std::vector<Panel<D>> mesh_panels(const BoundaryMesh& mesh) {
    std::vector<Panel<D>> panels;
    panels.reserve(mesh.num_facets());
    for (int f = 0; f < mesh.num_facets(); ++f)
        panels.push_back(quaddetail::panel_from_mesh<D>(mesh, f));
    return panels;
}

// Surface gradients of the facet's P1 hat functions (constant vectors in the
// facet plane; no orientation input, so they are consistent for any vertex
// ordering).
template <int D>
std::array<Vec<D>, D> hat_gradients(const Panel<D>& p) {
    std::array<Vec<D>, D> g;
    if constexpr (D == 2) {
        g[1] = (p.v[1] - p.v[0]) / (p.v[1] - p.v[0]).squaredNorm();
        g[0] = -g[1];
    } else {
        Eigen::Matrix<double, 2, 3> T;
        T.row(0) = (p.v[1] - p.v[0]).transpose();
        T.row(1) = (p.v[2] - p.v[0]).transpose();
        Eigen::Matrix<double, 3, 2> P = T.transpose() * (T * T.transpose()).inverse();
        g[1] = P.col(0);
        g[2] = P.col(1);
        g[0] = -g[1] - g[2];
    }
    return g;
}

// Packed weakly singular single-layer family: slot (0,0) carries psi(r) and
// the lower-right block r r^T / r^d, so one pair integral serves V, V_Delta,
// V_lame, and the Guenter form of W.
template <int D>
struct PackedSingleKernel {
    static constexpr int kDim = D + 1;
    Eigen::Matrix<double, kDim, kDim> operator()(const Vec<D>& x, const Vec<D>& y) const {
        const Vec<D> r = x - y;
        const double r2 = r.squaredNorm();
        Eigen::Matrix<double, kDim, kDim> out = Eigen::Matrix<double, kDim, kDim>::Zero();
        out(0, 0) = kernels::psi_sq<D>(r2);
        out.template bottomRightCorner<D, D>() = kernels::inv_rd<D>(r2) * (r * r.transpose());
        return out;
    }
};

// Packed double-layer family: slot (0,0) carries T_Delta and the lower-right
// block T_u, both with n = n(y) fixed per trial facet.
template <int D>
struct PackedDoubleKernel {
    static constexpr int kDim = D + 1;
    Vec<D> n;
    Eigen::Matrix<double, kDim, kDim> operator()(const Vec<D>& x, const Vec<D>& y) const {
        const Vec<D> r = x - y;
        const double r2 = r.squaredNorm();
        Eigen::Matrix<double, kDim, kDim> out = Eigen::Matrix<double, kDim, kDim>::Zero();
        out(0, 0) = kernels::layer_constant<D>() * r.dot(n) * kernels::inv_rd<D>(r2);
        out.template bottomRightCorner<D, D>() = kernels::T_u<D>(r, n);
        return out;
    }
};

// Averaged single-layer traction, n = n(x) fixed per test facet.
template <int D>
struct StressKernel {
    static constexpr int kDim = D;
    Vec<D> n;
    Mat<D> operator()(const Vec<D>& x, const Vec<D>& y) const {
        return kernels::stokeslet_stress<D>(x - y, n);
    }
};

template <int D>
struct RotletKernel {
    static constexpr int kDim = D;
    Vec<D> n;
    Mat<D> operator()(const Vec<D>& x, const Vec<D>& y) const {
        return kernels::M_rotlet<D>(x - y, n);
    }
};

// Antisymmetrized coincident rotlet: iint hat_v(y) M(x-y) over F x F equals
// 1/2 iint (hat_v(y) - hat_v(x)) M(x-y) because iint M vanishes by parity,
// and hat_v(y) - hat_v(x) = -g_v . r turns the principal value into this
// even, weakly singular kernel.
template <int D>
struct RotletHatKernel {
    static constexpr int kDim = D;
    Vec<D> g;
    Vec<D> n;
    Mat<D> operator()(const Vec<D>& x, const Vec<D>& y) const {
        const Vec<D> r = x - y;
        return (-g.dot(r)) * kernels::M_rotlet<D>(r, n);
    }
};

template <int D>
constexpr KernelHomogeneity single_hint() {
    return D == 3 ? KernelHomogeneity::Minus1 : KernelHomogeneity::LogHomogeneous;
}

template <int D>
constexpr KernelHomogeneity double_hint() {
    return D == 3 ? KernelHomogeneity::Minus2 : KernelHomogeneity::Minus1;
}

struct SingleLayerTargets {
    Eigen::MatrixXd* V = nullptr;
    Eigen::MatrixXd* V_delta = nullptr;
    Eigen::MatrixXd* V_lame = nullptr;
    Eigen::MatrixXd* W = nullptr;
};

// One traversal of all facet pairs with the packed psi / r r^T kernel. The
// raw pair integrals I0 = iint psi and I2 = iint r r^T / r^d combine into V,
// V_Delta, V_lame, and (contracted with per-node Guenter matrices) W. W is
// symmetrized; the pre-symmetrization asymmetry is returned.
template <int D>
double single_layer_pass(const BoundaryMesh& mesh, const KernelParams& params,
                         const QuadConfig& quad, const SingleLayerTargets& tgt) {
    const int n = mesh.num_facets();
    const int nv = mesh.num_vertices();
    const double C = kernels::layer_constant<D>();
    const double cV = 0.5 * C / params.nu;
    const double cL0 = 0.5 * C / params.mu * (1.0 + params.A);
    const double cL2 = 0.5 * C / params.mu * (1.0 - params.A);
    const double cW = params.nu * C;
    const auto panels = mesh_panels<D>(mesh);

    if (tgt.V) tgt.V->setZero(D * n, D * n);
    if (tgt.V_delta) tgt.V_delta->setZero(n, n);
    if (tgt.V_lame) tgt.V_lame->setZero(D * n, D * n);
    if (tgt.W) tgt.W->setZero(D * nv, D * nv);

    // Per-node Guenter matrices A_u = n g_u^T - g_u n^T (3D) resp. hat slopes
    // h_u' = -+1/L (2D).
    std::vector<std::array<Mat<D>, D>> amat;
    std::vector<std::array<double, 2>> hp;
    if (tgt.W) {
        if constexpr (D == 3) {
            amat.resize(n);
            for (int f = 0; f < n; ++f) {
                const Vec<3> nf = mesh.normals.row(f).transpose();
                const auto g = hat_gradients<3>(panels[f]);
                for (int u = 0; u < 3; ++u)
                    amat[f][u] = nf * g[u].transpose() - g[u] * nf.transpose();
            }
        } else {
            hp.resize(n);
            for (int f = 0; f < n; ++f) {
                hp[f][0] = -1.0 / mesh.measures(f);
                hp[f][1] = 1.0 / mesh.measures(f);
            }
        }
    }

    const PackedSingleKernel<D> kernel;
    const Mat<D> id = Mat<D>::Identity();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const PairClass cls = classify_pair(mesh, i, j, quad.near_eta);
            const Block blk = quaddetail::integrate_pair_t<D>(
                panels[i], panels[j], kernel, ShapeSet::P0, ShapeSet::P0, cls, quad,
                single_hint<D>(), i, j);
            const double I0 = blk(0, 0);
            const Mat<D> I2 = blk.block(1, 1, D, D);
            if (tgt.V) tgt.V->template block<D, D>(D * i, D * j) = cV * (I0 * id + I2);
            if (tgt.V_delta) (*tgt.V_delta)(i, j) = C * I0;
            if (tgt.V_lame)
                tgt.V_lame->template block<D, D>(D * i, D * j) = cL0 * I0 * id + cL2 * I2;
            if (tgt.W) {
                if constexpr (D == 3) {
                    for (int u = 0; u < 3; ++u)
                        for (int v = 0; v < 3; ++v) {
                            const Mat<3>& Au = amat[i][u];
                            const Mat<3>& Av = amat[j][v];
                            const Mat<3> S1 = Au * Av.transpose();
                            const Mat<3> S2 = Au * I2 * Av.transpose();
                            const double tr = Au.cwiseProduct(Av).sum();
                            tgt.W->template block<3, 3>(3 * mesh.facets(i, u),
                                                        3 * mesh.facets(j, v)) +=
                                cW * ((S1 + S1.transpose()) * I0 - S2) +
                                (0.5 * cW * tr) * I2;
                        }
                } else {
                    // The additional constant term of the 2D identity
                    // telescopes to zero over closed loops and is omitted.
                    const Mat<2> core = I0 * id + I2;
                    for (int u = 0; u < 2; ++u)
                        for (int v = 0; v < 2; ++v)
                            tgt.W->template block<2, 2>(2 * mesh.facets(i, u),
                                                        2 * mesh.facets(j, v)) +=
                                (2.0 * cW * hp[i][u] * hp[j][v]) * core;
                }
            }
        }
    }

    double asym = 0.0;
    if (tgt.W) {
        Eigen::MatrixXd& W = *tgt.W;
        asym = (W - W.transpose()).cwiseAbs().maxCoeff() /
               std::max(W.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        W = 0.5 * (W + W.transpose()).eval();
    }
    return asym;
}

// All facet pairs with the packed double-layer kernel; coincident pairs
// vanish identically on flat facets (r . n(y) = 0) and are skipped.
template <int D>
void double_layer_pass(const BoundaryMesh& mesh, const QuadConfig& quad, Eigen::MatrixXd* K,
                       Eigen::MatrixXd* K_delta) {
    const int n = mesh.num_facets();
    const int nv = mesh.num_vertices();
    const auto panels = mesh_panels<D>(mesh);
    if (K) K->setZero(D * n, D * nv);
    if (K_delta) K_delta->setZero(n, nv);
    for (int j = 0; j < n; ++j) {
        const PackedDoubleKernel<D> kernel{mesh.normals.row(j).transpose()};
        for (int i = 0; i < n; ++i) {
            const PairClass cls = classify_pair(mesh, i, j, quad.near_eta);
            if (cls == PairClass::Coincident) continue;
            const Block blk = quaddetail::integrate_pair_t<D>(
                panels[i], panels[j], kernel, ShapeSet::P0, ShapeSet::P1, cls, quad,
                double_hint<D>(), i, j);
            for (int v = 0; v < D; ++v) {
                const int node = mesh.facets(j, v);
                if (K)
                    K->template block<D, D>(D * i, D * node) +=
                        blk.block(1, v * (D + 1) + 1, D, D);
                if (K_delta) (*K_delta)(i, node) += blk(0, v * (D + 1));
            }
        }
    }
}

template <int D>
void kt_pass(const BoundaryMesh& mesh, const QuadConfig& quad, Eigen::MatrixXd& Kt) {
    const int n = mesh.num_facets();
    const auto panels = mesh_panels<D>(mesh);
    Kt.setZero(D * n, D * n);
    for (int i = 0; i < n; ++i) {
        const StressKernel<D> kernel{mesh.normals.row(i).transpose()};
        for (int j = 0; j < n; ++j) {
            const PairClass cls = classify_pair(mesh, i, j, quad.near_eta);
            if (cls == PairClass::Coincident) continue;
            const Block blk = quaddetail::integrate_pair_t<D>(
                panels[i], panels[j], kernel, ShapeSet::P0, ShapeSet::P0, cls, quad,
                double_hint<D>(), i, j);
            Kt.template block<D, D>(D * i, D * j) = blk.block(0, 0, D, D);
        }
    }
}

template <int D>
void kt_dual_pass(const BoundaryMesh& mesh, const QuadConfig& quad, Eigen::MatrixXd& Kt) {
    const int n = mesh.num_facets();
    const int nv = mesh.num_vertices();
    const auto panels = mesh_panels<D>(mesh);
    Kt.setZero(D * nv, D * n);
    for (int i = 0; i < n; ++i) {
        const StressKernel<D> kernel{mesh.normals.row(i).transpose()};
        for (int j = 0; j < n; ++j) {
            const PairClass cls = classify_pair(mesh, i, j, quad.near_eta);
            if (cls == PairClass::Coincident) continue;
            const Block blk = quaddetail::integrate_pair_t<D>(
                panels[i], panels[j], kernel, ShapeSet::P1, ShapeSet::P0, cls, quad,
                double_hint<D>(), i, j);
            for (int u = 0; u < D; ++u)
                Kt.template block<D, D>(D * mesh.facets(i, u), D * j) +=
                    blk.block(u * D, 0, D, D);
        }
    }
}

// Rotlet double layer R (P0 test x P1 trial).
template <int D>
void rotlet_pass(const BoundaryMesh& mesh, const QuadConfig& quad, Eigen::MatrixXd& R) {
    const int n = mesh.num_facets();
    const int nv = mesh.num_vertices();
    const auto panels = mesh_panels<D>(mesh);
    R.setZero(D * n, D * nv);
    for (int j = 0; j < n; ++j) {
        const Vec<D> nj = mesh.normals.row(j).transpose();
        const RotletKernel<D> kernel{nj};
        for (int i = 0; i < n; ++i) {
            const PairClass cls = classify_pair(mesh, i, j, quad.near_eta);
            if (cls == PairClass::Coincident) {
                const auto g = hat_gradients<D>(panels[j]);
                for (int v = 0; v < D; ++v) {
                    const RotletHatKernel<D> hat{g[v], nj};
                    const Block blk = quaddetail::integrate_pair_t<D>(
                        panels[i], panels[j], hat, ShapeSet::P0, ShapeSet::P0, cls, quad,
                        single_hint<D>(), i, j);
                    R.template block<D, D>(D * i, D * mesh.facets(j, v)) +=
                        0.5 * blk.block(0, 0, D, D);
                }
                continue;
            }
            const Block blk = quaddetail::integrate_pair_t<D>(
                panels[i], panels[j], kernel, ShapeSet::P0, ShapeSet::P1, cls, quad,
                double_hint<D>(), i, j);
            for (int v = 0; v < D; ++v)
                R.template block<D, D>(D * i, D * mesh.facets(j, v)) +=
                    blk.block(0, v * D, D, D);
        }
    }
}

// Exact distance from x to the facet panel.
inline double point_segment_distance(const Eigen::Vector2d& x, const Eigen::Vector2d& a,
                                     const Eigen::Vector2d& b) {
    const Eigen::Vector2d e = b - a;
    const double t = std::clamp((x - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    return (x - (a + t * e)).norm();
}

inline double point_triangle_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                      const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();
    const Eigen::Vector3d bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return bp.norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double t = d1 / (d1 - d3);
        return (p - (a + t * ab)).norm();
    }
    const Eigen::Vector3d cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return cp.norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double t = d2 / (d2 - d6);
        return (p - (a + t * ac)).norm();
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0) {
        const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + t * (c - b))).norm();
    }
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + (vb * denom) * ab + (vc * denom) * ac)).norm();
}

template <int D>
double point_panel_distance(const Panel<D>& p, const Vec<D>& x) {
    if constexpr (D == 2)
        return point_segment_distance(x, p.v[0], p.v[1]);
    else
        return point_triangle_distance(x, p.v[0], p.v[1], p.v[2]);
}

// Graded quadrature of a single facet integral against a fixed observation
// point: subdivide until the panel is farther from x than its own diameter,
// then apply the reference rule. fn receives physical points and weights.
template <int D, typename PointFn>
void graded_points(const Panel<D>& panel, const Vec<D>& x, int order, int depth,
                   PointFn&& fn) {
    constexpr int kDepthCap = 20;
    if (point_panel_distance<D>(panel, x) >= panel.diameter || depth >= kDepthCap) {
        const quaddetail::RefRule rule =
            (D == 2) ? quaddetail::ref_segment_rule(order) : quaddetail::ref_triangle_rule(order);
        const double jac = (D == 2) ? panel.measure : 2.0 * panel.measure;
        for (int q = 0; q < rule.n; ++q) {
            Vec<D> y = panel.v[0] + rule.a[q] * (panel.v[1] - panel.v[0]);
            if constexpr (D == 3) y += rule.b[q] * (panel.v[2] - panel.v[0]);
            fn(y, jac * rule.w[q]);
        }
        return;
    }
    for (const auto& child : quaddetail::split(panel))
        graded_points<D>(child, x, order, depth + 1, fn);
}

double winding_fraction(const BoundaryMesh& mesh, const Eigen::VectorXd& x) {
    double total = 0.0;
    if (mesh.d == 2) {
        const Eigen::Vector2d p = x.head<2>();
        for (int f = 0; f < mesh.num_facets(); ++f) {
            const Eigen::Vector2d a = mesh.vertices.row(mesh.facets(f, 0)).transpose().head<2>() - p;
            const Eigen::Vector2d b = mesh.vertices.row(mesh.facets(f, 1)).transpose().head<2>() - p;
            total += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
        }
        return total / (2.0 * std::numbers::pi);
    }
    const Eigen::Vector3d p = x.head<3>();
    for (int f = 0; f < mesh.num_facets(); ++f) {
        const Eigen::Vector3d a = mesh.vertices.row(mesh.facets(f, 0)).transpose().head<3>() - p;
        const Eigen::Vector3d b = mesh.vertices.row(mesh.facets(f, 1)).transpose().head<3>() - p;
        const Eigen::Vector3d c = mesh.vertices.row(mesh.facets(f, 2)).transpose().head<3>() - p;
        const double num = a.dot(b.cross(c));
        const double den = a.norm() * b.norm() * c.norm() + a.dot(b) * c.norm() +
                           b.dot(c) * a.norm() + c.dot(a) * b.norm();
        total += 2.0 * std::atan2(num, den);
    }
    return total / (4.0 * std::numbers::pi);
}

template <int D>
double boundary_distance(const std::vector<Panel<D>>& panels, const Vec<D>& x) {
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& p : panels) dist = std::min(dist, point_panel_distance<D>(p, x));
    return dist;
}

double mesh_scale(const BoundaryMesh& mesh) {
    const Eigen::VectorXd lo = mesh.vertices.colwise().minCoeff();
    const Eigen::VectorXd hi = mesh.vertices.colwise().maxCoeff();
    return (hi - lo).norm();
}

enum class PotentialFamily { Stokes, Laplace, Lame, Rotlet };

template <int D>
std::vector<FieldSample> eval_impl(const BoundaryMesh& mesh, const DensityVector& lambda,
                                   const TraceVector& phi, const Eigen::MatrixXd& points,
                                   const KernelParams& params, PotentialFamily fam,
                                   const QuadConfig& quad) {
    const int n = mesh.num_facets();
    const int nv = mesh.num_vertices();
    const bool has_lam = lambda.coeffs.size() > 0;
    const bool has_phi = phi.coeffs.size() > 0;
    if (has_lam && lambda.coeffs.size() != D * n)
        throw std::invalid_argument("eval_potentials: density size does not match mesh");
    if (has_phi && phi.coeffs.size() != D * nv)
        throw std::invalid_argument("eval_potentials: trace size does not match mesh");
    for (const auto* id : {&lambda.mesh_id, &phi.mesh_id})
        if (!id->empty() && !mesh.id.empty() && *id != mesh.id)
            throw std::invalid_argument("eval_potentials: coefficient mesh_id mismatch");
    if (points.cols() != D)
        throw std::invalid_argument("eval_potentials: points must have d columns");
    if (fam == PotentialFamily::Rotlet && has_lam)
        throw std::invalid_argument("eval_potentials: rotlet potential takes no density");

    const auto panels = mesh_panels<D>(mesh);
    const double on_gamma = 1e-12 * mesh_scale(mesh);

    std::vector<FieldSample> out;
    out.reserve(points.rows());
    for (int m = 0; m < points.rows(); ++m) {
        const Vec<D> x = points.row(m).transpose();
        if (boundary_distance<D>(panels, x) <= on_gamma)
            throw std::domain_error("eval_potentials: evaluation point lies on the boundary");
        FieldSample s;
        s.point = points.row(m).transpose();
        s.u = Eigen::VectorXd::Zero(D);
        s.side = classify_point(mesh, s.point);

        Vec<D> u = Vec<D>::Zero();
        double p = 0.0;
        for (int f = 0; f < n; ++f) {
            const Vec<D> nf = mesh.normals.row(f).transpose();
            Vec<D> lam = Vec<D>::Zero();
            if (has_lam) lam = lambda.coeffs.segment(D * f, D);
            std::array<Vec<D>, D> phn;
            if (has_phi)
                for (int v = 0; v < D; ++v) phn[v] = phi.coeffs.segment(D * mesh.facets(f, v), D);
            const auto frame = quaddetail::ShapeFrame<D>::from(panels[f], ShapeSet::P1);
            graded_points<D>(panels[f], x, quad.order, 0, [&](const Vec<D>& y, double w) {
                const Vec<D> r = x - y;
                Vec<D> ph = Vec<D>::Zero();
                if (has_phi) {
                    double sh[3];
                    frame.values(y, sh);
                    for (int v = 0; v < D; ++v) ph += sh[v] * phn[v];
                }
                switch (fam) {
                    case PotentialFamily::Stokes:
                        if (has_lam) {
                            u += w * (kernels::E_u<D>(r, params.nu) * lam);
                            p += w * kernels::e_p<D>(r).dot(lam);
                        }
                        if (has_phi) {
                            u -= w * (kernels::T_u<D>(r, nf) * ph);
                            p -= w * kernels::t_p<D>(r, nf, params.nu).dot(ph);
                        }
                        break;
                    case PotentialFamily::Laplace:
                        if (has_lam) u += w * (kernels::E_delta<D>(r) * lam);
                        if (has_phi) u -= w * (kernels::T_delta<D>(r, nf) * ph);
                        break;
                    case PotentialFamily::Lame:
                        if (has_lam) u += w * (kernels::E_lame<D>(r, params.mu, params.A) * lam);
                        if (has_phi) u -= w * (kernels::T_lame<D>(r, nf, params.A) * ph);
                        break;
                    case PotentialFamily::Rotlet:
                        if (has_phi) u += w * (kernels::M_rotlet<D>(r, nf) * ph);
                        break;
                }
            });
        }
        s.u = u;
        s.p = p;
        out.push_back(std::move(s));
    }
    return out;
}

// Traction rows of the double-layer field at z with observation normal q:
// row(z)[i, (node, c)] = iint H(z - y; n(y), q)_{ic} hat_node(y).
template <int D>
Eigen::MatrixXd traction_row(const BoundaryMesh& mesh, const std::vector<Panel<D>>& panels,
                             const Vec<D>& z, const Vec<D>& q, double nu, int order) {
    Eigen::MatrixXd row = Eigen::MatrixXd::Zero(D, D * mesh.num_vertices());
    for (int f = 0; f < mesh.num_facets(); ++f) {
        const Vec<D> nf = mesh.normals.row(f).transpose();
        const auto frame = quaddetail::ShapeFrame<D>::from(panels[f], ShapeSet::P1);
        std::array<Mat<D>, D> acc;
        acc.fill(Mat<D>::Zero());
        graded_points<D>(panels[f], z, order, 0, [&](const Vec<D>& y, double w) {
            const Mat<D> H = kernels::stresslet_stress<D>(z - y, nf, q, nu);
            double sh[3];
            frame.values(y, sh);
            for (int v = 0; v < D; ++v) acc[v] += (w * sh[v]) * H;
        });
        for (int v = 0; v < D; ++v)
            row.template block<D, D>(0, D * mesh.facets(f, v)) += acc[v];
    }
    return row;
}

template <int D>
double w_offset_pass(const BoundaryMesh& mesh, const KernelParams& params,
                     std::pair<double, double> offsets, const QuadConfig& quad,
                     Eigen::MatrixXd& W) {
    const int n = mesh.num_facets();
    const int nv = mesh.num_vertices();
    const auto panels = mesh_panels<D>(mesh);
    W.setZero(D * nv, D * nv);
    const int test_order = 2;
    const quaddetail::RefRule rule =
        (D == 2) ? quaddetail::ref_segment_rule(test_order) : quaddetail::ref_triangle_rule(test_order);
    for (int i = 0; i < n; ++i) {
        const Vec<D> ni = mesh.normals.row(i).transpose();
        const double e1 = offsets.first * panels[i].diameter;
        const double e2 = offsets.second * panels[i].diameter;
        const double jac = (D == 2) ? panels[i].measure : 2.0 * panels[i].measure;
        const auto frame = quaddetail::ShapeFrame<D>::from(panels[i], ShapeSet::P1);
        for (int qi = 0; qi < rule.n; ++qi) {
            Vec<D> xq = panels[i].v[0] + rule.a[qi] * (panels[i].v[1] - panels[i].v[0]);
            if constexpr (D == 3) xq += rule.b[qi] * (panels[i].v[2] - panels[i].v[0]);
            const double w = jac * rule.w[qi];
            double sh[3];
            frame.values(xq, sh);
            Eigen::MatrixXd trow = Eigen::MatrixXd::Zero(D, D * nv);
            for (const double sgn : {1.0, -1.0}) {
                const Eigen::MatrixXd r1 =
                    traction_row<D>(mesh, panels, Vec<D>(xq + sgn * e1 * ni), ni, params.nu,
                                    quad.order);
                const Eigen::MatrixXd r2 =
                    traction_row<D>(mesh, panels, Vec<D>(xq + sgn * e2 * ni), ni, params.nu,
                                    quad.order);
                trow += 0.5 * ((e1 * r2 - e2 * r1) / (e1 - e2));
            }
            for (int v = 0; v < D; ++v)
                W.middleRows(D * mesh.facets(i, v), D) -= (w * sh[v]) * trow;
        }
    }
    const double asym = (W - W.transpose()).cwiseAbs().maxCoeff() /
                        std::max(W.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    W = 0.5 * (W + W.transpose()).eval();
    return asym;
}

Eigen::MatrixXd mass_p0p1(const BoundaryMesh& mesh) {
    const int d = mesh.d;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d * mesh.num_facets(), d * mesh.num_vertices());
    for (int f = 0; f < mesh.num_facets(); ++f) {
        const double c = mesh.measures(f) / d;
        for (int v = 0; v < d; ++v)
            for (int a = 0; a < d; ++a) M(d * f + a, d * mesh.facets(f, v) + a) += c;
    }
    return M;
}

}  // namespace

OperatorMatrix assemble_V(const BoundaryMesh& mesh, const KernelParams& params,
                          const QuadConfig& quad) {
    require_compatible(mesh, params);
    Eigen::MatrixXd V;
    dispatch_dim(
        mesh.d,
        [&] { single_layer_pass<2>(mesh, params, quad, SingleLayerTargets{&V, nullptr, nullptr, nullptr}); },
        [&] { single_layer_pass<3>(mesh, params, quad, SingleLayerTargets{&V, nullptr, nullptr, nullptr}); });
    return make_op(OperatorTag::V, std::move(V), SpaceTag::DensityP0, SpaceTag::DensityP0,
                   params, mesh, false);
}

OperatorMatrix assemble_K(const BoundaryMesh& mesh, const KernelParams& params,
                          const QuadConfig& quad) {
    require_compatible(mesh, params);
    Eigen::MatrixXd K;
    dispatch_dim(
        mesh.d, [&] { double_layer_pass<2>(mesh, quad, &K, nullptr); },
        [&] { double_layer_pass<3>(mesh, quad, &K, nullptr); });
    return make_op(OperatorTag::K, std::move(K), SpaceTag::DensityP0, SpaceTag::TraceP1,
                   params, mesh, false);
}

OperatorMatrix assemble_Kt(const BoundaryMesh& mesh, const KernelParams& params,
                           const QuadConfig& quad) {
    require_compatible(mesh, params);
    Eigen::MatrixXd Kt;
    dispatch_dim(
        mesh.d, [&] { kt_pass<2>(mesh, quad, Kt); }, [&] { kt_pass<3>(mesh, quad, Kt); });
    return make_op(OperatorTag::Kt, std::move(Kt), SpaceTag::DensityP0, SpaceTag::DensityP0,
                   params, mesh, false);
}

OperatorMatrix assemble_Kt_dual(const BoundaryMesh& mesh, const KernelParams& params,
                                const QuadConfig& quad) {
    require_compatible(mesh, params);
    Eigen::MatrixXd Kt;
    dispatch_dim(
        mesh.d, [&] { kt_dual_pass<2>(mesh, quad, Kt); },
        [&] { kt_dual_pass<3>(mesh, quad, Kt); });
    return make_op(OperatorTag::Kt, std::move(Kt), SpaceTag::TraceP1, SpaceTag::DensityP0,
                   params, mesh, false);
}

OperatorMatrix assemble_W(const BoundaryMesh& mesh, const KernelParams& params,
                          const QuadConfig& quad) {
    require_compatible(mesh, params);
    Eigen::MatrixXd W;
    dispatch_dim(
        mesh.d,
        [&] { single_layer_pass<2>(mesh, params, quad, SingleLayerTargets{nullptr, nullptr, nullptr, &W}); },
        [&] { single_layer_pass<3>(mesh, params, quad, SingleLayerTargets{nullptr, nullptr, nullptr, &W}); });
    return make_op(OperatorTag::W, std::move(W), SpaceTag::TraceP1, SpaceTag::TraceP1, params,
                   mesh, true);
}

WOffsetResult assemble_W_offset(const BoundaryMesh& mesh, const KernelParams& params,
                                std::pair<double, double> offsets, const QuadConfig& quad) {
    require_compatible(mesh, params);
    if (!(offsets.first > offsets.second && offsets.second > 0.0))
        throw std::invalid_argument("assemble_W_offset: offsets must satisfy e1 > e2 > 0");
    Eigen::MatrixXd W;
    WOffsetResult res;
    res.asymmetry = dispatch_dim(
        mesh.d, [&] { return w_offset_pass<2>(mesh, params, offsets, quad, W); },
        [&] { return w_offset_pass<3>(mesh, params, offsets, quad, W); });
    res.W = make_op(OperatorTag::W, std::move(W), SpaceTag::TraceP1, SpaceTag::TraceP1, params,
                    mesh, true);
    return res;
}

OperatorMatrix assemble_V_delta(const BoundaryMesh& mesh, const QuadConfig& quad) {
    KernelParams params;
    params.d = mesh.d;
    Eigen::MatrixXd Vd;
    dispatch_dim(
        mesh.d,
        [&] { single_layer_pass<2>(mesh, params, quad, SingleLayerTargets{nullptr, &Vd, nullptr, nullptr}); },
        [&] { single_layer_pass<3>(mesh, params, quad, SingleLayerTargets{nullptr, &Vd, nullptr, nullptr}); });
    return make_op(OperatorTag::V_delta, std::move(Vd), SpaceTag::ScalarP0, SpaceTag::ScalarP0,
                   params, mesh, false);
}

OperatorMatrix assemble_K_delta(const BoundaryMesh& mesh, const QuadConfig& quad) {
    KernelParams params;
    params.d = mesh.d;
    Eigen::MatrixXd Kd;
    dispatch_dim(
        mesh.d, [&] { double_layer_pass<2>(mesh, quad, nullptr, &Kd); },
        [&] { double_layer_pass<3>(mesh, quad, nullptr, &Kd); });
    return make_op(OperatorTag::K_delta, std::move(Kd), SpaceTag::ScalarP0, SpaceTag::ScalarP1,
                   params, mesh, false);
}

OperatorMatrix assemble_V_lame(const BoundaryMesh& mesh, const KernelParams& params,
                               const QuadConfig& quad) {
    require_compatible(mesh, params);
    Eigen::MatrixXd Vl;
    dispatch_dim(
        mesh.d,
        [&] { single_layer_pass<2>(mesh, params, quad, SingleLayerTargets{nullptr, nullptr, &Vl, nullptr}); },
        [&] { single_layer_pass<3>(mesh, params, quad, SingleLayerTargets{nullptr, nullptr, &Vl, nullptr}); });
    return make_op(OperatorTag::V_lame, std::move(Vl), SpaceTag::DensityP0, SpaceTag::DensityP0,
                   params, mesh, false);
}

OperatorMatrix assemble_K_lame(const BoundaryMesh& mesh, const KernelParams& params,
                               const QuadConfig& quad) {
    require_compatible(mesh, params);
    Eigen::MatrixXd K, Kd, R;
    dispatch_dim(
        mesh.d,
        [&] {
            double_layer_pass<2>(mesh, quad, &K, &Kd);
            rotlet_pass<2>(mesh, quad, R);
        },
        [&] {
            double_layer_pass<3>(mesh, quad, &K, &Kd);
            rotlet_pass<3>(mesh, quad, R);
        });
    Eigen::MatrixXd Kl = params.A * lift_identity(Kd, mesh.d) - params.A * R +
                         (1.0 - params.A) * K;
    return make_op(OperatorTag::K_lame, std::move(Kl), SpaceTag::DensityP0, SpaceTag::TraceP1,
                   params, mesh, false);
}

OperatorMatrix assemble_mass(const BoundaryMesh& mesh, ShapeSet test, ShapeSet trial) {
    const int d = mesh.d;
    if (d != 2 && d != 3) throw std::invalid_argument("assemble_mass: dimension must be 2 or 3");
    KernelParams params;
    params.d = d;
    Eigen::MatrixXd M;
    SpaceTag rows, cols;
    if (test == ShapeSet::P0 && trial == ShapeSet::P0) {
        M.setZero(d * mesh.num_facets(), d * mesh.num_facets());
        for (int f = 0; f < mesh.num_facets(); ++f)
            for (int a = 0; a < d; ++a) M(d * f + a, d * f + a) = mesh.measures(f);
        rows = cols = SpaceTag::DensityP0;
    } else if (test == ShapeSet::P0 && trial == ShapeSet::P1) {
        M = mass_p0p1(mesh);
        rows = SpaceTag::DensityP0;
        cols = SpaceTag::TraceP1;
    } else if (test == ShapeSet::P1 && trial == ShapeSet::P0) {
        M = mass_p0p1(mesh).transpose();
        rows = SpaceTag::TraceP1;
        cols = SpaceTag::DensityP0;
    } else {
        M.setZero(d * mesh.num_vertices(), d * mesh.num_vertices());
        for (int f = 0; f < mesh.num_facets(); ++f) {
            const double c = mesh.measures(f) / (d * (d + 1));
            for (int u = 0; u < d; ++u)
                for (int v = 0; v < d; ++v) {
                    const double loc = c * (u == v ? 2.0 : 1.0);
                    for (int a = 0; a < d; ++a)
                        M(d * mesh.facets(f, u) + a, d * mesh.facets(f, v) + a) += loc;
                }
        }
        rows = cols = SpaceTag::TraceP1;
    }
    return make_op(OperatorTag::Mass, std::move(M), rows, cols, params, mesh,
                   rows == cols);
}

StokesOperatorSet assemble_stokes_operators(const BoundaryMesh& mesh,
                                            const KernelParams& params,
                                            const QuadConfig& quad) {
    require_compatible(mesh, params);
    StokesOperatorSet set;
    Eigen::MatrixXd V, Vd, W, K, Kd, Kt;
    double asym = 0.0;
    dispatch_dim(
        mesh.d,
        [&] {
            asym = single_layer_pass<2>(mesh, params, quad, SingleLayerTargets{&V, &Vd, nullptr, &W});
            double_layer_pass<2>(mesh, quad, &K, &Kd);
            kt_pass<2>(mesh, quad, Kt);
        },
        [&] {
            asym = single_layer_pass<3>(mesh, params, quad, SingleLayerTargets{&V, &Vd, nullptr, &W});
            double_layer_pass<3>(mesh, quad, &K, &Kd);
            kt_pass<3>(mesh, quad, Kt);
        });
    set.V = make_op(OperatorTag::V, std::move(V), SpaceTag::DensityP0, SpaceTag::DensityP0,
                    params, mesh, false);
    set.V_delta = make_op(OperatorTag::V_delta, std::move(Vd), SpaceTag::ScalarP0,
                          SpaceTag::ScalarP0, params, mesh, false);
    set.W = make_op(OperatorTag::W, std::move(W), SpaceTag::TraceP1, SpaceTag::TraceP1, params,
                    mesh, true);
    set.K = make_op(OperatorTag::K, std::move(K), SpaceTag::DensityP0, SpaceTag::TraceP1,
                    params, mesh, false);
    set.K_delta = make_op(OperatorTag::K_delta, std::move(Kd), SpaceTag::ScalarP0,
                          SpaceTag::ScalarP1, params, mesh, false);
    set.Kt = make_op(OperatorTag::Kt, std::move(Kt), SpaceTag::DensityP0, SpaceTag::DensityP0,
                     params, mesh, false);
    set.M00 = assemble_mass(mesh, ShapeSet::P0, ShapeSet::P0);
    set.M01 = assemble_mass(mesh, ShapeSet::P0, ShapeSet::P1);
    set.M11 = assemble_mass(mesh, ShapeSet::P1, ShapeSet::P1);
    set.w_asymmetry = asym;
    return set;
}

Side classify_point(const BoundaryMesh& mesh, const Eigen::VectorXd& x) {
    if (x.size() != mesh.d)
        throw std::invalid_argument("classify_point: point dimension does not match mesh");
    const double dist = dispatch_dim(
        mesh.d,
        [&] { return boundary_distance<2>(mesh_panels<2>(mesh), x.head<2>()); },
        [&] { return boundary_distance<3>(mesh_panels<3>(mesh), x.head<3>()); });
    if (dist <= 1e-12 * mesh_scale(mesh))
        throw std::domain_error("classify_point: point is on or too close to the boundary");
    const double w = winding_fraction(mesh, x);
    if (std::abs(w - 1.0) < 0.1) return Side::Interior;
    if (std::abs(w) < 0.1) return Side::Exterior;
    throw std::domain_error("classify_point: point is on or too close to the boundary");
}

std::vector<FieldSample> eval_potentials(const BoundaryMesh& mesh, const DensityVector& lambda,
                                         const TraceVector& phi, const Eigen::MatrixXd& points,
                                         const KernelParams& params, const QuadConfig& quad) {
    require_compatible(mesh, params);
    return dispatch_dim(
        mesh.d,
        [&] { return eval_impl<2>(mesh, lambda, phi, points, params, PotentialFamily::Stokes, quad); },
        [&] { return eval_impl<3>(mesh, lambda, phi, points, params, PotentialFamily::Stokes, quad); });
}

std::vector<FieldSample> eval_laplace_lame_potentials(
    const BoundaryMesh& mesh, const DensityVector& lambda, const TraceVector& phi,
    const Eigen::MatrixXd& points, const KernelParams& params, AuxKernel which,
    const QuadConfig& quad) {
    require_compatible(mesh, params);
    const PotentialFamily fam = which == AuxKernel::Laplace  ? PotentialFamily::Laplace
                                : which == AuxKernel::Lame   ? PotentialFamily::Lame
                                                             : PotentialFamily::Rotlet;
    return dispatch_dim(
        mesh.d, [&] { return eval_impl<2>(mesh, lambda, phi, points, params, fam, quad); },
        [&] { return eval_impl<3>(mesh, lambda, phi, points, params, fam, quad); });
}

Eigen::MatrixXd lift_identity(const Eigen::MatrixXd& scalar, int d) {
    if (d < 1) throw std::invalid_argument("lift_identity: d must be positive");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d * scalar.rows(), d * scalar.cols());
    for (int i = 0; i < scalar.rows(); ++i)
        for (int j = 0; j < scalar.cols(); ++j)
            for (int a = 0; a < d; ++a) out(d * i + a, d * j + a) = scalar(i, j);
    return out;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
    out << std::setprecision(17);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_matrix_csv: write failed for " + path);
}

namespace {
constexpr char kMatrixMagic[8] = {'S', 'B', 'E', 'M', 'M', 'A', 'T', '1'};
}

void write_matrix_binary(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_matrix_binary: cannot open " + path);
    out.write(kMatrixMagic, sizeof(kMatrixMagic));
    const std::int64_t dims[2] = {m.rows(), m.cols()};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    out.write(reinterpret_cast<const char*>(rm.data()),
              static_cast<std::streamsize>(sizeof(double) * rm.size()));
    if (!out) throw std::runtime_error("write_matrix_binary: write failed for " + path);
}

Eigen::MatrixXd read_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_matrix_binary: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kMatrixMagic))
        throw std::runtime_error("read_matrix_binary: bad magic in " + path);
    std::int64_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || dims[0] < 0 || dims[1] < 0)
        throw std::runtime_error("read_matrix_binary: bad header in " + path);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(dims[0], dims[1]);
    in.read(reinterpret_cast<char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double) * rm.size()));
    if (!in) throw std::runtime_error("read_matrix_binary: truncated data in " + path);
    return rm;
}

}  // namespace stokesbem
