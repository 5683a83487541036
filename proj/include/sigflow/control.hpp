#pragma once

#include "sigflow/linalg.hpp"

#include <variant>
#include <vector>

namespace sigflow {

// Control matrix F(x) of the system y' = F(y) a, |a| <= 1.
struct ConstantControl {
    Mat2 m = Mat2::Identity();
};

// F(x) = c(x) Id with c(x, y) = sum_ij coeffs[i][j] x^i y^j.
struct IsotropicPolyControl {
    std::vector<std::vector<double>> coeffs;
    double speed(const Vec2& x) const;
};

class ControlSpec {
public:
    ControlSpec() = default;
    ControlSpec(ConstantControl c) : v_(std::move(c)) {}
    ControlSpec(IsotropicPolyControl c) : v_(std::move(c)) {}

    Mat2 at(const Vec2& x) const;
    const std::variant<ConstantControl, IsotropicPolyControl>& variant() const { return v_; }

private:
    std::variant<ConstantControl, IsotropicPolyControl> v_;
};

// G(x) = (F^T)^{-1} F^{-1}; throws InputError when F(x) is singular.
Mat2 control_metric(const ControlSpec& f, const Vec2& x);

} // namespace sigflow
