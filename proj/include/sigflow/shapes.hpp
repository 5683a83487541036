#pragma once

#include "sigflow/polygon.hpp"

#include <numbers>

namespace sigflow::shapes {

// Axis-aligned square [-r, r]^2.
inline Polygon square(double r = 1.0)
{
    return Polygon({{-r, -r}, {r, -r}, {r, r}, {-r, r}});
}

// n-gon inscribed in the ellipse x^2/a^2 + y^2/b^2 = 1. Vertices sit at half-step
// angles, so both axes cross edge midpoints rather than vertices.
inline Polygon ellipse(int n, double a, double b)
{
    std::vector<Vec2> v;
    v.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * (k + 0.5) / n;
        v.emplace_back(a * std::cos(t), b * std::sin(t));
    }
    return Polygon(std::move(v));
}

inline Polygon regular(int n, double r = 1.0)
{
    return ellipse(n, r, r);
}

// L-shaped hexagon: [0,2]^2 minus the open square (1,2)^2.
inline Polygon lshape()
{
    return Polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
}

} // namespace sigflow::shapes
