#pragma once

#include "sigflow/metric.hpp"
#include "sigflow/polygon.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>

namespace sigflow {

// Problem instance: a simple counterclockwise polygon with a metric field.
// Immutable after construction; make_scene and the loaders enforce the invariants.
struct Scene {
    Polygon boundary;
    MetricField metric;
    std::optional<double> curvature_bound;
    double grid_h = 0.01;
    // Smallest metric eigenvalue seen while validating.
    double lambda_min = 1.0;
};

Scene make_scene(Polygon boundary, MetricField metric = MetricField::euclidean(),
                 std::optional<double> curvature_bound = std::nullopt, double grid_h = 0.01);

Scene parse_scene(const nlohmann::json& j);
Scene load_scene(const std::filesystem::path& path);
nlohmann::ordered_json scene_to_json(const Scene& s);
void save_scene(const Scene& s, const std::filesystem::path& path);

// Ambient diameter of the domain. Constant metrics are exact (attained at vertices);
// position-dependent metrics use lattice geodesics at half the scene spacing.
double diameter(const Scene& s);

} // namespace sigflow
