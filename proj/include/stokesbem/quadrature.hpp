#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stokesbem/geom.hpp"
#include "stokesbem/tables.hpp"

namespace stokesbem {

// Rule on the reference facet: t in [0,1] (d=2) or barycentric (a,b) with
// a + b <= 1 (d=3). Weights sum to the reference measure (1 resp. 1/2).
struct QuadratureRule {
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;
    int order = 0;
};

enum class PairClass { Separated, Near, Adjacent, Coincident };
enum class ShapeSet { P0, P1 };

// Optional kernel structure hint for touching pairs (shared vertex/edge or
// coincident). Translation-invariant kernels that are exactly homogeneous of
// degree -1 or -2 in r = x - y, or of log-affine form k(s r) = k(r) +
// log(s) S with a constant matrix S (the 2D Stokes family), admit an exact
// self-similarity reduction: the children of a midpoint split that still
// touch are half-scale copies of their parent pair, so the singular part is
// eliminated algebraically and only well-separated pieces are quadratured.
// General falls back to graded subdivision toward the shared simplex.
// LogHomogeneous kernels must be evaluable off the panels (S is probed at
// scaled offsets of the panel centroid).
enum class KernelHomogeneity { General, Minus1, Minus2, LogHomogeneous };

struct QuadConfig {
    int order = 6;           // Gauss points per reference direction
    double near_eta = 2.0;   // near threshold: centroid distance / max diameter
    int adapt_depth = 6;     // subdivision cap for near pairs
    double near_tol = 1e-10; // two-level acceptance tolerance
    int touching_depth = 4;  // grading depth toward shared simplices (General)
    int min_order = 2;       // floor for distance/depth-graded orders
    bool grade_far = true;   // lower the order on well-separated pairs
};

QuadratureRule panel_rule(int d, int order);
QuadratureRule log_rule(int order);  // weight log(1/t) on [0,1]

PairClass classify_pair(const BoundaryMesh& mesh, int f1, int f2, double eta);

using PairKernel =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& x, const Eigen::VectorXd& y)>;

// Galerkin block of \int_{f1} \int_{f2} shape_i(x) K(x,y) shape_j(y); rows are
// (test shape, kernel row) pairs with the kernel index fastest, columns
// likewise. P1 shapes follow local vertex order of the facet.
Eigen::MatrixXd integrate_pair(const BoundaryMesh& mesh, int f1, int f2,
                               const PairKernel& kernel, int kernel_dim,
                               ShapeSet test_space, ShapeSet trial_space, PairClass cls,
                               const QuadConfig& cfg,
                               KernelHomogeneity hint = KernelHomogeneity::General);

namespace quaddetail {

// Cached reference rules (flat arrays to keep recursion allocation-free).
struct RefRule {
    const double* a = nullptr;  // first reference coordinate
    const double* b = nullptr;  // second (d=3 only)
    const double* w = nullptr;
    int n = 0;
};

RefRule ref_segment_rule(int order);
RefRule ref_triangle_rule(int order);

template <int D>
struct Panel {
    std::array<Eigen::Matrix<double, D, 1>, D> v;
    Eigen::Matrix<double, D, 1> centroid;
    double measure = 0;
    double diameter = 0;
};

template <int D>
inline Panel<D> make_panel(const std::array<Eigen::Matrix<double, D, 1>, D>& verts) {
    Panel<D> p;
    p.v = verts;
    p.centroid.setZero();
    for (const auto& q : verts) p.centroid += q;
    p.centroid /= double(D);
    if constexpr (D == 2) {
        p.measure = (verts[1] - verts[0]).norm();
        p.diameter = p.measure;
    } else {
        p.measure = 0.5 * (verts[1] - verts[0]).cross(verts[2] - verts[0]).norm();
        p.diameter = std::max({(verts[1] - verts[0]).norm(), (verts[2] - verts[1]).norm(),
                               (verts[0] - verts[2]).norm()});
    }
    return p;
}

template <int D>
inline Panel<D> panel_from_mesh(const BoundaryMesh& mesh, int f) {
    std::array<Eigen::Matrix<double, D, 1>, D> verts;
    for (int k = 0; k < D; ++k)
        verts[k] = mesh.vertices.row(mesh.facets(f, k)).transpose().template head<D>();
    return make_panel<D>(verts);
}

template <int D>
inline std::array<Panel<D>, 2 * (D - 1)> split(const Panel<D>& p) {
    if constexpr (D == 2) {
        Eigen::Vector2d m = 0.5 * (p.v[0] + p.v[1]);
        return {make_panel<2>({p.v[0], m}), make_panel<2>({m, p.v[1]})};
    } else {
        Eigen::Vector3d m01 = 0.5 * (p.v[0] + p.v[1]);
        Eigen::Vector3d m12 = 0.5 * (p.v[1] + p.v[2]);
        Eigen::Vector3d m20 = 0.5 * (p.v[2] + p.v[0]);
        return {make_panel<3>({p.v[0], m01, m20}), make_panel<3>({m01, p.v[1], m12}),
                make_panel<3>({m20, m12, p.v[2]}), make_panel<3>({m01, m12, m20})};
    }
}

// Count of exactly shared corner points (children of conforming facets share
// them bitwise, since midpoints are computed from identical vertex data).
template <int D>
inline int shared_points(const Panel<D>& p, const Panel<D>& q) {
    int count = 0;
    for (const auto& a : p.v)
        for (const auto& c : q.v)
            if (a == c) ++count;
    return count;
}

template <int D>
inline double pair_rho(const Panel<D>& p, const Panel<D>& q) {
    return (p.centroid - q.centroid).norm() / std::max(p.diameter, q.diameter);
}

// Evaluates the original facet's shape functions at a physical point; P1 uses
// barycentric coordinates of the parent facet, so it stays valid on
// subdivided pieces.
template <int D>
struct ShapeFrame {
    bool p1 = false;
    Eigen::Matrix<double, D, 1> origin;
    Eigen::Matrix<double, D - 1, D> pinv;

    static ShapeFrame from(const Panel<D>& p, ShapeSet s) {
        ShapeFrame f;
        f.p1 = (s == ShapeSet::P1);
        if (!f.p1) return f;
        f.origin = p.v[0];
        Eigen::Matrix<double, D, D - 1> edges;
        for (int k = 0; k + 1 < D; ++k) edges.col(k) = p.v[k + 1] - p.v[0];
        f.pinv = (edges.transpose() * edges).inverse() * edges.transpose();
        return f;
    }

    int count() const { return p1 ? D : 1; }

    void values(const Eigen::Matrix<double, D, 1>& x, double* sh) const {
        if (!p1) {
            sh[0] = 1.0;
            return;
        }
        Eigen::Matrix<double, D - 1, 1> loc = pinv * (x - origin);
        sh[0] = 1.0 - loc.sum();
        for (int k = 0; k + 1 < D; ++k) sh[k + 1] = loc[k];
    }
};

using Block = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 12, 12>;

// Kernel functors provide `static constexpr int kDim` and
// `Eigen::Matrix<double,kDim,kDim> operator()(const Vec&, const Vec&) const`.
template <int D, typename F>
class PairEngine {
public:
    static constexpr int KD = F::kDim;
    using Vec = Eigen::Matrix<double, D, 1>;
    using KMat = Eigen::Matrix<double, KD, KD>;

    PairEngine(const Panel<D>& p1, const Panel<D>& p2, const F& kernel, ShapeSet test,
               ShapeSet trial, const QuadConfig& cfg, KernelHomogeneity hint)
        : p1_(p1),
          p2_(p2),
          kernel_(kernel),
          cfg_(cfg),
          hint_(hint),
          fx_(ShapeFrame<D>::from(p1, test)),
          fy_(ShapeFrame<D>::from(p2, trial)) {}

    Block run(PairClass cls) {
        Block acc = Block::Zero(fx_.count() * KD, fy_.count() * KD);
        switch (cls) {
            case PairClass::Separated: {
                int q = far_order(pair_rho(p1_, p2_));
                tensor(p1_, p2_, q, q, acc);
                break;
            }
            case PairClass::Near:
                near(p1_, p2_, 0, acc);
                break;
            case PairClass::Adjacent:
                touching_pair(p1_, p2_, 0, acc);
                break;
            case PairClass::Coincident:
                coincident(acc);
                break;
        }
        return acc;
    }

private:
    const Panel<D>& p1_;
    const Panel<D>& p2_;
    const F& kernel_;
    const QuadConfig& cfg_;
    KernelHomogeneity hint_;
    ShapeFrame<D> fx_, fy_;

    int depth_order(int depth) const {
        return std::max(std::min(cfg_.order, cfg_.min_order + 1), cfg_.order - depth);
    }

    int far_order(double rho) const {
        if (!cfg_.grade_far || rho < 2.0 * cfg_.near_eta) return cfg_.order;
        int octaves = int(std::floor(std::log2(rho / cfg_.near_eta)));
        return std::max(cfg_.min_order, cfg_.order - 2 * octaves);
    }

    // Scale factor of a pair integral under a joint half-scale map: measures
    // contribute 2^(-2(D-1)), the kernel 2^kappa (log-affine kernels scale
    // like kappa = 0 plus the additive correction handled in selfsim).
    double theta() const {
        const double kap = hint_ == KernelHomogeneity::Minus2   ? 2.0
                           : hint_ == KernelHomogeneity::Minus1 ? 1.0
                                                                : 0.0;
        return std::pow(2.0, kap - 2.0 * (D - 1));
    }

    bool selfsim_ok() const {
        if (hint_ == KernelHomogeneity::General) return false;
        if (hint_ == KernelHomogeneity::LogHomogeneous) return D == 2 && !fx_.p1 && !fy_.p1;
        return true;
    }

    KMat log_slope() const {
        if (hint_ != KernelHomogeneity::LogHomogeneous) return KMat::Zero();
        const Vec x0 = p1_.centroid;
        const Vec r0 = 0.5853 * (p1_.v[1] - p1_.v[0]);
        return (kernel_(x0 + 2.0 * r0, x0) - kernel_(x0 + r0, x0)) / std::log(2.0);
    }

    void tensor(const Panel<D>& px, const Panel<D>& py, int qx, int qy, Block& acc) const {
        const double jac_x = (D == 2) ? px.measure : 2.0 * px.measure;
        const double jac_y = (D == 2) ? py.measure : 2.0 * py.measure;
        RefRule rx = (D == 2) ? ref_segment_rule(qx) : ref_triangle_rule(qx);
        RefRule ry = (D == 2) ? ref_segment_rule(qy) : ref_triangle_rule(qy);
        double shx[3], shy[3];
        const int nt = fx_.count(), ns = fy_.count();
        for (int i = 0; i < rx.n; ++i) {
            Vec x = map_point(px, rx, i);
            fx_.values(x, shx);
            const double wx = jac_x * rx.w[i];
            for (int j = 0; j < ry.n; ++j) {
                Vec y = map_point(py, ry, j);
                fy_.values(y, shy);
                KMat K = kernel_(x, y);
                const double w = wx * jac_y * ry.w[j];
                for (int u = 0; u < nt; ++u)
                    for (int v = 0; v < ns; ++v)
                        acc.template block<KD, KD>(u * KD, v * KD) +=
                            (w * shx[u] * shy[v]) * K;
            }
        }
    }

    static Vec map_point(const Panel<D>& p, const RefRule& r, int i) {
        if constexpr (D == 2)
            return p.v[0] + r.a[i] * (p.v[1] - p.v[0]);
        else
            return p.v[0] + r.a[i] * (p.v[1] - p.v[0]) + r.b[i] * (p.v[2] - p.v[0]);
    }

    void near(const Panel<D>& px, const Panel<D>& py, int depth, Block& acc) const {
        const double rho = pair_rho(px, py);
        const int q = depth_order(depth);
        if (rho >= cfg_.near_eta) {
            tensor(px, py, q, q, acc);
            return;
        }
        Block hi = Block::Zero(acc.rows(), acc.cols());
        tensor(px, py, q, q, hi);
        if (depth >= cfg_.adapt_depth) {
            acc += hi;
            return;
        }
        Block lo = Block::Zero(acc.rows(), acc.cols());
        tensor(px, py, std::max(2, q - 1), std::max(2, q - 1), lo);
        const double err = (hi - lo).cwiseAbs().maxCoeff();
        if (err <= cfg_.near_tol * (1.0 + hi.cwiseAbs().maxCoeff())) {
            acc += hi;
            return;
        }
        for (const auto& cx : split(px))
            for (const auto& cy : split(py)) near(cx, cy, depth + 1, acc);
    }

    // Touching pairs (shared vertex or edge, or coincident callers' children).
    void touching_pair(const Panel<D>& px, const Panel<D>& py, int depth,
                       Block& acc) const {
        if (selfsim_ok()) {
            acc += selfsim(px, py, log_slope());
            return;
        }
        graded(px, py, depth, acc);
    }

    void graded(const Panel<D>& px, const Panel<D>& py, int depth, Block& acc) const {
        if (shared_points<D>(px, py) == 0) {
            near(px, py, depth, acc);
            return;
        }
        const int cap = (D == 2) ? cfg_.touching_depth + 8 : cfg_.touching_depth;
        if (depth >= cap) {
            const int q = depth_order(depth);
            tensor(px, py, q, q, acc);
            return;
        }
        for (const auto& cx : split(px))
            for (const auto& cy : split(py)) graded(cx, cy, depth + 1, acc);
    }

    // Exact self-similarity reduction for hinted kernels. Child pairs of the
    // midpoint split that keep the full shared simplex are exact scale-s
    // copies of the parent pair (corner children: s = 1/2 about the shared
    // vertex; the middle child of a coincident split: s = -1/2 about the
    // centroid, valid for even kernels). Affine shape functions transform as
    // hat_u(z + s(y - z)) = s hat_u(y) + (1 - s) hat_u(z), so the copies
    // contribute theta C_x (x) C_y times the unknown block and the pair
    // integral solves from a small linear system; everything else is either a
    // strictly smaller touching class or well separated.
    Block selfsim(const Panel<D>& px, const Panel<D>& py, const KMat& S) const {
        const int shared = shared_points<D>(px, py);
        const int nt = fx_.count(), ns = fy_.count();
        auto cx = split(px);
        auto cy = split(py);

        struct CopyRef {
            int ix, iy;
            Vec z;
            double s;
        };
        std::vector<CopyRef> copies;
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j)
                if (px.v[i] == py.v[j]) copies.push_back({i, j, px.v[i], 0.5});
        const bool same_panel = (shared == D && px.v == py.v);
        if (same_panel && D == 3) copies.push_back({3, 3, px.centroid, -0.5});

        auto is_copy = [&](int i, int j) {
            for (const auto& c : copies)
                if (c.ix == i && c.iy == j) return true;
            return false;
        };

        Block rest = Block::Zero(nt * KD, ns * KD);
        for (int i = 0; i < int(cx.size()); ++i) {
            for (int j = 0; j < int(cy.size()); ++j) {
                if (is_copy(i, j)) continue;
                if (shared_points<D>(cx[i], cy[j]) == 0)
                    near(cx[i], cy[j], 1, rest);
                else
                    rest += selfsim(cx[i], cy[j], S);
            }
        }
        if (hint_ == KernelHomogeneity::LogHomogeneous)
            rest += (0.25 * std::log(0.5) * px.measure * py.measure *
                     double(copies.size())) *
                    S;

        // The copy shells form a geometric series with ratio copies * theta;
        // at or beyond 1 the pair integral does not exist absolutely.
        if (double(copies.size()) * theta() >= 1.0 - 1e-9)
            throw std::invalid_argument(
                "integrate_pair: kernel too singular for a touching pair");

        // (I - sum_i theta_i Cx_i (x) Cy_i) B = rest, solved over shape pairs.
        const int nb = nt * ns;
        Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(nb, nb);
        double shx[3], shy[3];
        for (const auto& c : copies) {
            const double th = theta();
            fx_.values(c.z, shx);
            fy_.values(c.z, shy);
            for (int u = 0; u < nt; ++u)
                for (int v = 0; v < ns; ++v)
                    for (int l = 0; l < nt; ++l)
                        for (int m = 0; m < ns; ++m) {
                            const double cxv =
                                c.s * (u == l ? 1.0 : 0.0) + (1.0 - c.s) * shx[u];
                            const double cyv =
                                c.s * (v == m ? 1.0 : 0.0) + (1.0 - c.s) * shy[v];
                            sys(u * ns + v, l * ns + m) -= th * cxv * cyv;
                        }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
        if (!lu.isInvertible())
            throw std::invalid_argument(
                "integrate_pair: kernel too singular for a touching pair");
        Eigen::MatrixXd rhs(nb, KD * KD);
        for (int u = 0; u < nt; ++u)
            for (int v = 0; v < ns; ++v) {
                KMat blk = rest.template block<KD, KD>(u * KD, v * KD);
                rhs.row(u * ns + v) = Eigen::Map<Eigen::RowVectorXd>(blk.data(), KD * KD);
            }
        Eigen::MatrixXd sol = lu.solve(rhs);
        Block out(nt * KD, ns * KD);
        for (int u = 0; u < nt; ++u)
            for (int v = 0; v < ns; ++v) {
                Eigen::RowVectorXd row = sol.row(u * ns + v);
                out.template block<KD, KD>(u * KD, v * KD) =
                    Eigen::Map<KMat>(row.data());
            }
        return out;
    }

    bool even_kernel() const {
        const Vec x0 = p1_.centroid;
        const Vec r0 = 0.5853 * (p1_.v[1] - p1_.v[0]);
        KMat plus = kernel_(x0 + r0, x0);
        KMat minus = kernel_(x0 - r0, x0);
        return (plus - minus).cwiseAbs().maxCoeff() <=
               1e-8 * (1.0 + plus.cwiseAbs().maxCoeff());
    }

    void coincident(Block& acc) const {
        if constexpr (D == 2) {
            if (selfsim_ok()) {
                acc += selfsim(p1_, p1_, log_slope());
                return;
            }
            coincident2d(acc);
        } else {
            if (selfsim_ok() && even_kernel()) {
                acc += selfsim(p1_, p1_, KMat::Zero());
                return;
            }
            graded_coincident3d(acc);
        }
    }

    // 2D coincident pair: substitute s = t + u and grade geometrically in the
    // separation u; handles log-type weak singularities for any kernel.
    void coincident2d(Block& acc) const
        requires(D == 2)
    {
        const double L = p1_.measure;
        const Eigen::Vector2d a = p1_.v[0];
        const Eigen::Vector2d tau = (p1_.v[1] - p1_.v[0]) / L;
        RefRule g = ref_segment_rule(cfg_.order + 6);
        const double sigma = 0.15;
        const int levels = cfg_.adapt_depth + 10;
        double shx[3], shy[3];
        const int nt = fx_.count(), ns = fy_.count();
        double hi = 1.0;
        for (int lev = 0; lev < levels; ++lev) {
            const double lo = hi * sigma;
            for (int iu = 0; iu < g.n; ++iu) {
                const double u = (lo + (hi - lo) * g.a[iu]) * L;
                const double wu = (hi - lo) * L * g.w[iu];
                const double span = L - u;
                for (int it = 0; it < g.n; ++it) {
                    const double t = span * g.a[it];
                    const double w = wu * span * g.w[it];
                    Eigen::Vector2d ylow = a + t * tau;
                    Eigen::Vector2d yhigh = a + (t + u) * tau;
                    accumulate_point(yhigh, ylow, w, shx, shy, nt, ns, acc);
                    accumulate_point(ylow, yhigh, w, shx, shy, nt, ns, acc);
                }
            }
            hi = lo;
        }
    }

    void accumulate_point(const Vec& x, const Vec& y, double w, double* shx, double* shy,
                          int nt, int ns, Block& acc) const {
        fx_.values(x, shx);
        fy_.values(y, shy);
        KMat K = kernel_(x, y);
        for (int u = 0; u < nt; ++u)
            for (int v = 0; v < ns; ++v)
                acc.template block<KD, KD>(u * KD, v * KD) += (w * shx[u] * shy[v]) * K;
    }

    // Tail of a shell series from its last four values. The shells of the
    // coincident peel behave like alpha rho^l + beta (rho/4)^l (cell means
    // converge with one extra h^2 factor), i.e. satisfy a two-term linear
    // recurrence, fitted here and summed forward; entries where the fit is
    // degenerate or non-decaying fall back to a single measured ratio.
    static double shell_tail(double a0, double a1, double a2, double a3, double ref_ratio,
                             double scale) {
        double q = ref_ratio;
        if (a2 != 0.0) {
            const double t = a3 / a2;
            if (t > 0.0 && t < 0.9) q = t;
        }
        const double fallback = a3 * q / (1.0 - q);
        if (std::abs(a3) <= 1e-13 * scale) return fallback;
        const double det = a1 * a1 - a0 * a2;
        if (std::abs(det) <= 1e-10 * (a1 * a1 + std::abs(a0 * a2))) return fallback;
        const double p = (a1 * a2 - a0 * a3) / det;
        const double r = (a1 * a3 - a2 * a2) / det;
        double x0 = a2, x1 = a3, sum = 0.0;
        for (int it = 0; it < 400; ++it) {
            const double x2 = p * x1 + r * x0;
            if (!std::isfinite(x2) || std::abs(x2) > 4.0 * std::abs(a3)) return fallback;
            sum += x2;
            if (std::abs(x2) <= 1e-17 * scale) return sum;
            x0 = x1;
            x1 = x2;
        }
        return fallback;
    }

    // General-kernel 3D coincident fallback: peel the diagonal by midpoint
    // splits down to touching_depth, then estimate the remaining diagonal tail
    // from the decay of the computed shells.
    void graded_coincident3d(Block& acc) const
        requires(D == 3)
    {
        std::vector<Panel<3>> diag = {p1_};
        std::vector<Block> shells;
        for (int depth = 0; depth < cfg_.touching_depth; ++depth) {
            Block level = Block::Zero(acc.rows(), acc.cols());
            std::vector<Panel<3>> next;
            for (const auto& t : diag) {
                auto ch = split(t);
                for (int i = 0; i < 4; ++i) {
                    for (int j = 0; j < 4; ++j) {
                        if (i == j) continue;
                        touching_pair(ch[i], ch[j], 0, level);
                    }
                    next.push_back(ch[i]);
                }
            }
            acc += level;
            shells.push_back(level);
            diag = std::move(next);
        }
        const int H = int(shells.size());
        if (H < 2) return;
        const double nlev = shells[H - 1].cwiseAbs().maxCoeff();
        const double nprev = shells[H - 2].cwiseAbs().maxCoeff();
        if (!(nprev > 0.0 && nlev < nprev)) return;
        const double R = std::min(nlev / nprev, 0.9);
        for (int r = 0; r < acc.rows(); ++r)
            for (int c = 0; c < acc.cols(); ++c) {
                if (H >= 4) {
                    acc(r, c) += shell_tail(shells[H - 4](r, c), shells[H - 3](r, c),
                                            shells[H - 2](r, c), shells[H - 1](r, c), R,
                                            nlev);
                } else {
                    double q = R;
                    if (shells[H - 2](r, c) != 0.0) {
                        const double t = shells[H - 1](r, c) / shells[H - 2](r, c);
                        if (t > 0.0 && t < 0.9) q = t;
                    }
                    acc(r, c) += shells[H - 1](r, c) * q / (1.0 - q);
                }
            }
    }
};

template <int D, typename F>
Block integrate_pair_t(const Panel<D>& p1, const Panel<D>& p2, const F& kernel,
                       ShapeSet test, ShapeSet trial, PairClass cls, const QuadConfig& cfg,
                       KernelHomogeneity hint, int f1 = -1, int f2 = -1) {
    PairEngine<D, F> engine(p1, p2, kernel, test, trial, cfg, hint);
    Block out = engine.run(cls);
    if (!out.allFinite())
        throw std::runtime_error("integrate_pair: non-finite kernel value for pair (" +
                                 std::to_string(f1) + ", " + std::to_string(f2) + ")");
    return out;
}

}  // namespace quaddetail

}  // namespace stokesbem
