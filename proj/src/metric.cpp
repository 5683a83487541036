#include "sigflow/metric.hpp"

#include "sigflow/errors.hpp"

#include <cmath>

namespace sigflow {

double IsotropicPolyControl::speed(const Vec2& x) const
{
    double c = 0.0;
    double xi = 1.0;
    for (const auto& row : coeffs) {
        double yj = 1.0;
        for (const double k : row) {
            c += k * xi * yj;
            yj *= x.y();
        }
        xi *= x.x();
    }
    return c;
}

Mat2 ControlSpec::at(const Vec2& x) const
{
    if (const auto* c = std::get_if<ConstantControl>(&v_)) return c->m;
    return std::get<IsotropicPolyControl>(v_).speed(x) * Mat2::Identity();
}

Mat2 control_metric(const ControlSpec& f, const Vec2& x)
{
    const Mat2 fx = f.at(x);
    const double det = fx.determinant();
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det))
        throw InputError("control matrix F is singular at (" + std::to_string(x.x()) + "," + std::to_string(x.y()) + ")");
    const Mat2 finv = inverse2(fx);
    Mat2 g = finv.transpose() * finv;
    g(0, 1) = g(1, 0) = 0.5 * (g(0, 1) + g(1, 0));
    return g;
}

std::string_view to_string(MetricKind k)
{
    switch (k) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::constant_matrix: return "constant_matrix";
    case MetricKind::control_field: return "control_field";
    case MetricKind::grid_sampled: return "grid_sampled";
    }
    return "unknown";
}

namespace {

Mat2 sample_bilinear(const SampledMetric& s, const Vec2& x)
{
    const Vec2 r = (x - s.origin) / s.h;
    const double fx = std::clamp(r.x(), 0.0, static_cast<double>(s.nx - 1));
    const double fy = std::clamp(r.y(), 0.0, static_cast<double>(s.ny - 1));
    const int i0 = std::min(static_cast<int>(std::floor(fx)), std::max(s.nx - 2, 0));
    const int j0 = std::min(static_cast<int>(std::floor(fy)), std::max(s.ny - 2, 0));
    const int i1 = std::min(i0 + 1, s.nx - 1);
    const int j1 = std::min(j0 + 1, s.ny - 1);
    const double u = fx - i0;
    const double v = fy - j0;
    auto lerp = [&](const std::vector<double>& a) {
        auto at = [&](int i, int j) { return a[static_cast<size_t>(j) * static_cast<size_t>(s.nx) + static_cast<size_t>(i)]; };
        return (1 - u) * (1 - v) * at(i0, j0) + u * (1 - v) * at(i1, j0) + (1 - u) * v * at(i0, j1) + u * v * at(i1, j1);
    };
    Mat2 m;
    m(0, 0) = lerp(s.a11);
    m(0, 1) = m(1, 0) = lerp(s.a12);
    m(1, 1) = lerp(s.a22);
    return m;
}

} // namespace

Mat2 MetricField::at(const Vec2& x) const
{
    return std::visit(
        [&](const auto& m) -> Mat2 {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, EuclideanMetric>) return Mat2::Identity();
            else if constexpr (std::is_same_v<T, ConstantMetric>) return m.a;
            else if constexpr (std::is_same_v<T, ControlMetric>) return control_metric(m.f, x);
            else return sample_bilinear(m, x);
        },
        v_);
}

MetricKind MetricField::kind() const
{
    return static_cast<MetricKind>(v_.index());
}

bool MetricField::is_constant() const
{
    return kind() == MetricKind::euclidean || kind() == MetricKind::constant_matrix;
}

} // namespace sigflow
