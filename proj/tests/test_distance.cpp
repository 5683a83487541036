#include "oracles.hpp"

#include "sigflow/distance.hpp"
#include "sigflow/errors.hpp"
#include "sigflow/shapes.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace sigflow;

namespace {

Polygon random_star_hexagon(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> angles;
    for (int k = 0; k < 6; ++k) angles.push_back(2.0 * std::numbers::pi * (k + 0.8 * u(rng)) / 6.0);
    std::vector<Vec2> v;
    for (const double t : angles) {
        const double r = 0.6 + 0.8 * u(rng);
        v.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    return Polygon(v);
}

std::vector<Vec2> interior_samples(const Polygon& poly, int n, std::mt19937_64& rng)
{
    const BoundingBox box = poly.bbox();
    std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
    std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
    std::vector<Vec2> out;
    while (static_cast<int>(out.size()) < n) {
        const Vec2 p(ux(rng), uy(rng));
        if (poly.contains(p)) out.push_back(p);
    }
    return out;
}

} // namespace

TEST_SUITE("distance") {

TEST_CASE("disk projection is radial")
{
    const DistanceField f(make_scene(shapes::regular(256)));
    const auto ps = f.project(Vec2(0.5, 0));
    CHECK(ps.delta == doctest::Approx(0.5).epsilon(2e-4));
    REQUIRE(ps.projections.size() == 1);
    CHECK((ps.projections[0].foot - Vec2(1, 0)).norm() <= 1e-4);
}

TEST_CASE("square diagonal point has two projections")
{
    const DistanceField f(make_scene(shapes::square()));
    const auto ps = f.project(Vec2(0.3, 0.3));
    CHECK(ps.delta == doctest::Approx(0.7).epsilon(1e-15));
    REQUIRE(ps.projections.size() == 2);
    std::vector<Vec2> feet{ps.projections[0].foot, ps.projections[1].foot};
    std::sort(feet.begin(), feet.end(), [](const Vec2& a, const Vec2& b) { return a.x() > b.x(); });
    CHECK((feet[0] - Vec2(1, 0.3)).norm() <= 1e-15);
    CHECK((feet[1] - Vec2(0.3, 1)).norm() <= 1e-15);
}

TEST_CASE("distance matches dense boundary sampling on random hexagons")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 3; ++trial) {
        const Polygon poly = random_star_hexagon(rng);
        REQUIRE(poly.is_simple());
        const DistanceField f(make_scene(poly));
        for (const Vec2& x : interior_samples(poly, 50, rng)) {
            const double ref = oracle::sampled_boundary_distance(poly, x, 1000000);
            CHECK(std::abs(f.value(x) - ref) <= 1e-4);
            CHECK(f.value(x) <= ref + 1e-15);
        }
    }
}

TEST_CASE("superdifferential examples on the square")
{
    const DistanceField f(make_scene(shapes::square()));
    {
        const auto fan = f.fan(Vec2(0.5, 0));
        REQUIRE(fan.generators.size() == 1);
        CHECK(fan.generators[0] == Vec2(-1, 0));
        CHECK(fan.velocity == Vec2(-1, 0));
        CHECK(fan.speed_sq == 1.0);
        CHECK_FALSE(fan.singular);
        CHECK_FALSE(fan.ambiguous);
    }
    {
        const auto fan = f.fan(Vec2(0.3, 0.3));
        CHECK(fan.generators.size() == 2);
        CHECK((fan.velocity - Vec2(-0.5, -0.5)).norm() <= 1e-15);
        CHECK(fan.speed_sq == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(fan.singular);
    }
    {
        const auto fan = f.fan(Vec2(0, 0));
        CHECK(fan.generators.size() == 4);
        CHECK(fan.velocity == Vec2(0, 0));
        CHECK(fan.speed_sq == 0.0);
        CHECK(fan.singular);
    }
}

TEST_CASE("points outside the domain are rejected")
{
    const DistanceField f(make_scene(shapes::square()));
    CHECK_THROWS_AS(f.project(Vec2(2, 2)), DomainError);
    CHECK_THROWS_AS(f.fan(Vec2(1, 0.5)), DomainError);
    CHECK_THROWS_AS(f.value(Vec2(-1, -1)), DomainError);
}

TEST_CASE("generators saturate the eikonal equation")
{
    std::mt19937_64 rng(29);
    const Mat2 a = (Mat2() << 3.0, 0.7, 0.7, 0.5).finished();
    for (const Scene& s : {make_scene(shapes::lshape()), make_scene(shapes::ellipse(64, 2, 1), MetricField::constant(a))}) {
        const DistanceField f(s);
        const Mat2 ainv = s.metric.at(Vec2::Zero()).inverse();
        for (const Vec2& x : interior_samples(s.boundary, 300, rng)) {
            const auto fan = f.fan(x);
            for (const auto& p : fan.generators) CHECK(std::abs(p.dot(ainv * p) - 1.0) <= 1e-9);
            if (fan.generators.size() == 1) CHECK(fan.speed_sq == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotonicity inequality for the squared distance")
{
    std::mt19937_64 rng(31);
    const Scene s = make_scene(shapes::lshape());
    const DistanceField f(s);
    const auto pts = interior_samples(s.boundary, 400, rng);
    double worst = -1e300;
    for (size_t k = 0; k + 1 < pts.size(); k += 2) {
        const Vec2& x = pts[k];
        const Vec2& y = pts[k + 1];
        if (!s.boundary.segment_clear(x, y)) continue;
        const auto fx = f.fan(x);
        const auto fy = f.fan(y);
        for (const auto& p : fx.generators)
            for (const auto& q : fy.generators)
                worst = std::max(worst, (fx.delta * p - fy.delta * q).dot(x - y) - (x - y).squaredNorm());
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("distance is 1-Lipschitz")
{
    std::mt19937_64 rng(37);
    const Scene s = make_scene(shapes::ellipse(128, 2, 1));
    const DistanceField f(s);
    const auto pts = interior_samples(s.boundary, 200, rng);
    for (size_t k = 0; k + 1 < pts.size(); k += 2)
        CHECK(std::abs(f.value(pts[k]) - f.value(pts[k + 1])) <= (pts[k] - pts[k + 1]).norm() + 1e-14);
}

TEST_CASE("fans wider than the generator limit reduce exactly")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 100; ++trial) {
        const double spread = trial % 2 ? 2.0 * std::numbers::pi : 2.5;
        std::vector<Vec2> g;
        for (int i = 0; i < 40; ++i) {
            const double t = spread * u(rng) / (2.0 * std::numbers::pi);
            g.emplace_back(std::cos(t), std::sin(t));
        }
        const auto idx = reduce_unit_fan(g, Mat2::Identity());
        std::vector<Vec2> sub;
        for (const int i : idx) sub.push_back(g[static_cast<size_t>(i)]);
        const auto reduced = min_norm_point(sub, Mat2::Identity());
        // Optimality against every generator certifies the reduction.
        for (const auto& p : g) CHECK(reduced.point.dot(p - reduced.point) >= -1e-12);
    }
}

TEST_CASE("disk centre collects every edge")
{
    const DistanceField f(make_scene(shapes::regular(256)));
    const auto fan = f.fan(Vec2(0, 0));
    CHECK(fan.generators.size() == 256);
    CHECK(fan.speed_sq == 0.0);
    CHECK(fan.singular);
}

TEST_CASE("lattice backend agrees with exact projection")
{
    const Scene s = make_scene(shapes::square(), MetricField::euclidean(), std::nullopt, 0.02);
    const DistanceField exact(s, Backend::exact);
    const DistanceField lat(s, Backend::lattice);
    std::mt19937_64 rng(43);
    double worst = 0.0;
    for (const Vec2& x : interior_samples(s.boundary, 300, rng)) worst = std::max(worst, std::abs(exact.value(x) - lat.value(x)));
    CHECK(worst <= 3.0 * s.grid_h);
    const auto fan = lat.fan(Vec2(0.5, 0.05));
    REQUIRE(fan.generators.size() == 1);
    CHECK((fan.generators[0] - Vec2(-1, 0)).norm() <= 0.05);
    const auto diag = lat.fan(Vec2(0.3, 0.3));
    CHECK(diag.singular);
    CHECK(diag.speed_sq == doctest::Approx(0.5).epsilon(0.05));
    CHECK_THROWS_AS(DistanceField(make_scene(shapes::square(), MetricField(ControlMetric{ConstantControl{}})), Backend::exact),
                    InputError);
}

} // TEST_SUITE
