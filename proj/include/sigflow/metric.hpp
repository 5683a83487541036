#pragma once

#include "sigflow/control.hpp"
#include "sigflow/linalg.hpp"

#include <string_view>
#include <variant>
#include <vector>

namespace sigflow {

struct EuclideanMetric {};

struct ConstantMetric {
    Mat2 a = Mat2::Identity();
};

struct ControlMetric {
    ControlSpec f;
};

// Lattice of SPD matrices with bilinear interpolation of the entries.
// Entry (i, j) is stored at index j * nx + i; queries outside the lattice clamp to it.
struct SampledMetric {
    Vec2 origin = Vec2::Zero();
    double h = 1.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> a11, a12, a22;
};

enum class MetricKind { euclidean, constant_matrix, control_field, grid_sampled };

std::string_view to_string(MetricKind k);

// Position-dependent SPD matrix A(x) defining g_x(u, w) = <A(x) u, w>.
class MetricField {
public:
    using Variant = std::variant<EuclideanMetric, ConstantMetric, ControlMetric, SampledMetric>;

    MetricField() = default;
    MetricField(Variant v) : v_(std::move(v)) {}

    static MetricField euclidean() { return MetricField(EuclideanMetric{}); }
    static MetricField constant(const Mat2& a) { return MetricField(ConstantMetric{a}); }

    Mat2 at(const Vec2& x) const;
    MetricKind kind() const;
    // Euclidean and constant-matrix metrics are position independent.
    bool is_constant() const;
    const Variant& variant() const { return v_; }

private:
    Variant v_;
};

} // namespace sigflow
