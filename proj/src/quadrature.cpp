#include "stokesbem/quadrature.hpp"

#include <map>
#include <vector>

namespace stokesbem {

namespace quaddetail {

namespace {

struct StoredRule {
    std::vector<double> a, b, w;
};

const StoredRule& segment_cache(int order) {
    static std::map<int, StoredRule> cache;
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    const tables::GaussTable& t = tables::gauss_legendre01(order);
    StoredRule r;
    r.a.assign(t.x, t.x + t.n);
    r.w.assign(t.w, t.w + t.n);
    return cache.emplace(order, std::move(r)).first->second;
}

// Collapsed tensor rule on the reference triangle {a,b >= 0, a + b <= 1},
// exact for total degree 2*order - 1: substituting b = y(1-a) gives
// int_T f = int_0^1 (1-a) int_0^1 f(a, y(1-a)) dy da, and the extra factor
// (1-a) raises the outer polynomial degree by one.
const StoredRule& triangle_cache(int order) {
    static std::map<int, StoredRule> cache;
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    const tables::GaussTable& gx = tables::gauss_legendre01(order + 1);
    const tables::GaussTable& gy = tables::gauss_legendre01(order);
    StoredRule r;
    r.a.reserve(gx.n * gy.n);
    r.b.reserve(gx.n * gy.n);
    r.w.reserve(gx.n * gy.n);
    for (int i = 0; i < gx.n; ++i) {
        for (int j = 0; j < gy.n; ++j) {
            r.a.push_back(gx.x[i]);
            r.b.push_back(gy.x[j] * (1.0 - gx.x[i]));
            r.w.push_back(gx.w[i] * gy.w[j] * (1.0 - gx.x[i]));
        }
    }
    return cache.emplace(order, std::move(r)).first->second;
}

}  // namespace

RefRule ref_segment_rule(int order) {
    const StoredRule& s = segment_cache(order);
    return {s.a.data(), nullptr, s.w.data(), int(s.a.size())};
}

RefRule ref_triangle_rule(int order) {
    const StoredRule& s = triangle_cache(order);
    return {s.a.data(), s.b.data(), s.w.data(), int(s.a.size())};
}

}  // namespace quaddetail

QuadratureRule panel_rule(int d, int order) {
    if (d != 2 && d != 3) throw std::invalid_argument("panel_rule: dimension must be 2 or 3");
    if (order < 1) throw std::invalid_argument("panel_rule: order must be positive");
    quaddetail::RefRule r =
        (d == 2) ? quaddetail::ref_segment_rule(order) : quaddetail::ref_triangle_rule(order);
    QuadratureRule out;
    out.order = order;
    out.points.resize(r.n, d - 1);
    out.weights.resize(r.n);
    for (int i = 0; i < r.n; ++i) {
        out.points(i, 0) = r.a[i];
        if (d == 3) out.points(i, 1) = r.b[i];
        out.weights[i] = r.w[i];
    }
    return out;
}

QuadratureRule log_rule(int order) {
    const tables::GaussTable& t = tables::gauss_log01(order);
    QuadratureRule out;
    out.order = order;
    out.points.resize(t.n, 1);
    out.weights.resize(t.n);
    for (int i = 0; i < t.n; ++i) {
        out.points(i, 0) = t.x[i];
        out.weights[i] = t.w[i];
    }
    return out;
}

PairClass classify_pair(const BoundaryMesh& mesh, int f1, int f2, double eta) {
    const int n = int(mesh.facets.rows());
    if (f1 < 0 || f1 >= n || f2 < 0 || f2 >= n)
        throw std::invalid_argument("classify_pair: facet index out of range");
    if (f1 == f2) return PairClass::Coincident;
    for (int i = 0; i < mesh.d; ++i)
        for (int j = 0; j < mesh.d; ++j)
            if (mesh.facets(f1, i) == mesh.facets(f2, j)) return PairClass::Adjacent;
    const double dist = (mesh.centroids.row(f1) - mesh.centroids.row(f2)).norm();
    const double scale = std::max(mesh.diameters[f1], mesh.diameters[f2]);
    return dist < eta * scale ? PairClass::Near : PairClass::Separated;
}

namespace {

template <int D, int KD>
struct ErasedKernel {
    static constexpr int kDim = KD;
    const PairKernel* f;
    mutable Eigen::VectorXd xbuf, ybuf;

    Eigen::Matrix<double, KD, KD> operator()(const Eigen::Matrix<double, D, 1>& x,
                                             const Eigen::Matrix<double, D, 1>& y) const {
        xbuf = x;
        ybuf = y;
        Eigen::MatrixXd m = (*f)(xbuf, ybuf);
        if (m.rows() != KD || m.cols() != KD)
            throw std::invalid_argument("integrate_pair: kernel returned a block of size " +
                                        std::to_string(m.rows()) + "x" +
                                        std::to_string(m.cols()) + ", expected " +
                                        std::to_string(KD));
        return m;
    }
};

template <int D>
Eigen::MatrixXd integrate_dispatch(const BoundaryMesh& mesh, int f1, int f2,
                                   const PairKernel& kernel, int kernel_dim,
                                   ShapeSet test_space, ShapeSet trial_space, PairClass cls,
                                   const QuadConfig& cfg, KernelHomogeneity hint) {
    using namespace quaddetail;
    Panel<D> p1 = panel_from_mesh<D>(mesh, f1);
    Panel<D> p2 = panel_from_mesh<D>(mesh, f2);
    auto run = [&](auto wrapped) -> Eigen::MatrixXd {
        return integrate_pair_t<D>(p1, p2, wrapped, test_space, trial_space, cls, cfg, hint,
                                   f1, f2);
    };
    switch (kernel_dim) {
        case 1:
            return run(ErasedKernel<D, 1>{&kernel, {}, {}});
        case 2:
            return run(ErasedKernel<D, 2>{&kernel, {}, {}});
        case 3:
            return run(ErasedKernel<D, 3>{&kernel, {}, {}});
        case 4:
            return run(ErasedKernel<D, 4>{&kernel, {}, {}});
        default:
            throw std::invalid_argument("integrate_pair: kernel_dim must be in [1, 4]");
    }
}

}  // namespace

Eigen::MatrixXd integrate_pair(const BoundaryMesh& mesh, int f1, int f2,
                               const PairKernel& kernel, int kernel_dim, ShapeSet test_space,
                               ShapeSet trial_space, PairClass cls, const QuadConfig& cfg,
                               KernelHomogeneity hint) {
    if (mesh.d == 2)
        return integrate_dispatch<2>(mesh, f1, f2, kernel, kernel_dim, test_space,
                                     trial_space, cls, cfg, hint);
    return integrate_dispatch<3>(mesh, f1, f2, kernel, kernel_dim, test_space, trial_space,
                                 cls, cfg, hint);
}

}  // namespace stokesbem
