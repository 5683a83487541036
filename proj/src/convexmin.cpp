#include "sigflow/convexmin.hpp"

#include "sigflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sigflow {

namespace {

constexpr double tol_vi = 1e-10;
constexpr double weight_floor = 1e-14;

struct Corral {
    std::vector<double> w;
    bool origin_inside = false;
};

Corral segment(const Vec2& za, const Vec2& zb)
{
    const Vec2 d = zb - za;
    const double dd = d.squaredNorm();
    const double t = dd > 0.0 ? std::clamp(-za.dot(d) / dd, 0.0, 1.0) : 0.0;
    return {{1.0 - t, t}, false};
}

// Barycentric coordinates of the origin; false when the triangle is degenerate.
bool barycentric_origin(const Vec2& a, const Vec2& b, const Vec2& c, double w[3])
{
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), (c - b).squaredNorm()});
    if (!(std::abs(det) > 1e-14 * scale)) return false;
    w[1] = ((-a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (-a.y())) / det;
    w[2] = ((b.x() - a.x()) * (-a.y()) - (-a.x()) * (b.y() - a.y())) / det;
    w[0] = 1.0 - w[1] - w[2];
    return true;
}

Corral triangle(const Vec2& z0, const Vec2& z1, const Vec2& z2)
{
    double w[3];
    if (barycentric_origin(z0, z1, z2, w) && w[0] >= 0.0 && w[1] >= 0.0 && w[2] >= 0.0)
        return {{w[0], w[1], w[2]}, true};
    const Vec2 z[3] = {z0, z1, z2};
    Corral best{{1.0, 0.0, 0.0}, false};
    double best_val = std::numeric_limits<double>::infinity();
    for (int e = 0; e < 3; ++e) {
        const int i = e;
        const int j = (e + 1) % 3;
        const Corral s = segment(z[i], z[j]);
        const double val = (s.w[0] * z[i] + s.w[1] * z[j]).squaredNorm();
        if (val < best_val) {
            best_val = val;
            best.w = {0.0, 0.0, 0.0};
            best.w[static_cast<size_t>(i)] = s.w[0];
            best.w[static_cast<size_t>(j)] = s.w[1];
        }
    }
    return best;
}

// Minimum-norm point of the affine hull of the corral members.
std::vector<double> affine_minimizer(const std::vector<Vec2>& z, const std::vector<int>& members)
{
    const auto m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j)
            k(i, j) = z[static_cast<size_t>(members[static_cast<size_t>(i)])].dot(z[static_cast<size_t>(members[static_cast<size_t>(j)])]);
        k(i, m) = k(m, i) = 1.0;
    }
    rhs(m) = 1.0;
    const Eigen::VectorXd sol = k.fullPivLu().solve(rhs);
    return {sol.data(), sol.data() + m};
}

Corral wolfe(const std::vector<Vec2>& z)
{
    const int n = static_cast<int>(z.size());
    int start = 0;
    for (int i = 1; i < n; ++i)
        if (z[static_cast<size_t>(i)].squaredNorm() < z[static_cast<size_t>(start)].squaredNorm()) start = i;
    std::vector<int> members{start};
    std::vector<double> lambda{1.0};
    Vec2 x = z[static_cast<size_t>(start)];
    double zmax = 0.0;
    for (const auto& zi : z) zmax = std::max(zmax, zi.squaredNorm());

    for (int major = 0; major < 8 * n + 16; ++major) {
        int j = 0;
        for (int i = 1; i < n; ++i)
            if (x.dot(z[static_cast<size_t>(i)]) < x.dot(z[static_cast<size_t>(j)])) j = i;
        if (x.dot(z[static_cast<size_t>(j)] - x) >= -tol_vi * std::max(1.0, zmax)) break;
        if (std::find(members.begin(), members.end(), j) != members.end()) break;
        members.push_back(j);
        lambda.push_back(0.0);
        for (int minor = 0; minor < 8; ++minor) {
            const std::vector<double> mu = affine_minimizer(z, members);
            if (std::all_of(mu.begin(), mu.end(), [](double v) { return v > weight_floor; })) {
                lambda = mu;
                break;
            }
            double theta = 1.0;
            for (size_t i = 0; i < mu.size(); ++i)
                if (mu[i] <= weight_floor) theta = std::min(theta, lambda[i] / (lambda[i] - mu[i]));
            for (size_t i = 0; i < mu.size(); ++i) lambda[i] = theta * mu[i] + (1.0 - theta) * lambda[i];
            std::vector<int> keep_m;
            std::vector<double> keep_l;
            for (size_t i = 0; i < members.size(); ++i)
                if (lambda[i] > weight_floor) {
                    keep_m.push_back(members[i]);
                    keep_l.push_back(lambda[i]);
                }
            const double total = std::accumulate(keep_l.begin(), keep_l.end(), 0.0);
            for (auto& l : keep_l) l /= total;
            members = std::move(keep_m);
            lambda = std::move(keep_l);
        }
        x = Vec2::Zero();
        for (size_t i = 0; i < members.size(); ++i) x += lambda[i] * z[static_cast<size_t>(members[i])];
    }

    Corral c;
    c.w.assign(static_cast<size_t>(n), 0.0);
    for (size_t i = 0; i < members.size(); ++i) c.w[static_cast<size_t>(members[i])] = lambda[i];
    c.origin_inside = members.size() == 3 && x.squaredNorm() <= 1e-28 * std::max(1.0, zmax);
    return c;
}

} // namespace

SimplexSolution min_norm_point(std::span<const Vec2> generators, const Mat2& a, int max_generators, MinNormMethod method)
{
    if (generators.empty()) throw InputError("min_norm_point: empty generator list");
    if (static_cast<int>(generators.size()) > max_generators)
        throw InputError("min_norm_point: " + std::to_string(generators.size()) + " generators exceed the limit of "
                         + std::to_string(max_generators));
    if (!a.allFinite() || !is_spd(a)) throw InputError("min_norm_point: metric is not SPD");

    Mat2 ainv = inverse2(a);
    ainv(0, 1) = ainv(1, 0) = 0.5 * (ainv(0, 1) + ainv(1, 0));
    const Mat2 lt = Eigen::LLT<Mat2>(ainv).matrixU(); // ainv = lt^T lt

    // Canonical order makes the result independent of the input permutation.
    std::vector<int> order(generators.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        const Vec2& p = generators[static_cast<size_t>(i)];
        const Vec2& q = generators[static_cast<size_t>(j)];
        return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
    });
    std::vector<Vec2> z;
    z.reserve(order.size());
    for (const int i : order) z.push_back(lt * generators[static_cast<size_t>(i)]);

    Corral c;
    const bool closed = method == MinNormMethod::automatic && z.size() <= 3;
    if (closed && z.size() == 1) c = {{1.0}, false};
    else if (closed && z.size() == 2) c = segment(z[0], z[1]);
    else if (closed) c = triangle(z[0], z[1], z[2]);
    else c = wolfe(z);

    SimplexSolution s;
    s.weights.assign(generators.size(), 0.0);
    for (size_t k = 0; k < order.size(); ++k) {
        s.weights[static_cast<size_t>(order[k])] = c.w[k];
        s.point += c.w[k] * generators[static_cast<size_t>(order[k])];
    }
    if (c.origin_inside) s.point.setZero();
    s.velocity = ainv * s.point;
    s.objective = std::max(0.0, s.point.dot(s.velocity));
    return s;
}

} // namespace sigflow
