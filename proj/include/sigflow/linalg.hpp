#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

namespace sigflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Length of v in the metric <a v, v>.
inline double metric_norm(const Mat2& a, const Vec2& v)
{
    return std::sqrt(std::max(0.0, v.dot(a * v)));
}

// Eigenvalues (ascending) of the symmetric part of a.
inline std::pair<double, double> symmetric_eigenvalues(const Mat2& a)
{
    const double p = 0.5 * (a(0, 0) + a(1, 1));
    const double off = 0.5 * (a(0, 1) + a(1, 0));
    const double q = 0.5 * (a(0, 0) - a(1, 1));
    const double r = std::hypot(q, off);
    return {p - r, p + r};
}

inline bool is_symmetric(const Mat2& a, double tol = 1e-12)
{
    return std::abs(a(0, 1) - a(1, 0)) <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

inline bool is_spd(const Mat2& a)
{
    return is_symmetric(a) && symmetric_eigenvalues(a).first > 0.0;
}

inline Mat2 inverse2(const Mat2& a)
{
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    Mat2 inv;
    inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
    return inv / det;
}

} // namespace sigflow
