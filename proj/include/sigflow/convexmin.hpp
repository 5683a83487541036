#pragma once

#include "sigflow/linalg.hpp"

#include <span>
#include <vector>

namespace sigflow {

// Minimiser of q -> <A^{-1} q, q> over the convex hull of a finite set of covectors.
struct SimplexSolution {
    std::vector<double> weights; // on the simplex, aligned with the input generators
    Vec2 point = Vec2::Zero();    // p* = sum weights[i] * p_i
    Vec2 velocity = Vec2::Zero(); // v* = A^{-1} p*
    double objective = 0.0;       // s* = <A^{-1} p*, p*> = <A v*, v*>
};

enum class MinNormMethod {
    automatic, // closed-form segment/triangle projection for up to three generators
    wolfe,     // corral iteration for any count
};

// Throws InputError for an empty list, more than max_generators entries or a non-SPD a.
// The result depends only on the multiset of generators, not on their order.
SimplexSolution min_norm_point(std::span<const Vec2> generators, const Mat2& a, int max_generators = 16,
                               MinNormMethod method = MinNormMethod::automatic);

} // namespace sigflow
