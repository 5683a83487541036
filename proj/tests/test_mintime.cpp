#include "oracles.hpp"

#include "sigflow/errors.hpp"
#include "sigflow/mintime.hpp"
#include "sigflow/shapes.hpp"
#include "sigflow/topology.hpp"

#include <doctest.h>

#include <random>

using namespace sigflow;

namespace {

Scene control_square(const ControlSpec& f, double h = 0.01)
{
    return make_scene(shapes::square(), metric_from_control(f), std::nullopt, h);
}

// Speed 2 on the left half of [-1,1]^2, 1 on the right, sampled every 0.05.
MetricField two_speed_metric()
{
    SampledMetric s;
    s.origin = {-1.0, -1.0};
    s.h = 0.05;
    s.nx = s.ny = 41;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double c = s.origin.x() + i * s.h < 0.0 ? 2.0 : 1.0;
            s.a11.push_back(1.0 / (c * c));
            s.a12.push_back(0.0);
            s.a22.push_back(1.0 / (c * c));
        }
    return MetricField(s);
}

} // namespace

TEST_SUITE("mintime") {

TEST_CASE("metric from control")
{
    const Vec2 x(0.2, -0.4);
    CHECK(metric_from_control(ConstantControl{2.0 * Mat2::Identity()}).at(x).isApprox(0.25 * Mat2::Identity(), 1e-15));

    Mat2 f;
    f << 1.0, 0.0, 1.0, 1.0;
    Mat2 g;
    g << 2.0, -1.0, -1.0, 1.0;
    const Mat2 got = metric_from_control(ConstantControl{f}).at(x);
    CHECK(got.isApprox(g, 1e-14));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int k = 0; k < 20; ++k) {
        const Vec2 v(n01(rng), n01(rng));
        CHECK(v.dot(got * v) == doctest::Approx((f.inverse() * v).squaredNorm()).epsilon(1e-12));
    }

    IsotropicPolyControl iso;
    iso.coeffs = {{1.0}, {0.0}, {1.0}}; // 1 + x^2
    for (double t : {-1.0, -0.3, 0.0, 0.7}) {
        const double c = 1.0 + t * t;
        CHECK(metric_from_control(iso).at({t, 0.5}).isApprox(Mat2::Identity() / (c * c), 1e-14));
    }
    CHECK_THROWS_AS(metric_from_control(ConstantControl{Mat2::Zero()}).at(x), InputError);
}

TEST_CASE("exit time on the square")
{
    const double h = 0.01;
    const DistanceField unit(control_square(ConstantControl{Mat2::Identity()}, h));
    const DistanceField fast(control_square(ConstantControl{2.0 * Mat2::Identity()}, h));
    CHECK(unit.backend() == Backend::lattice);
    CHECK(std::abs(min_time(unit, {0.3, 0.3}) - 0.7) <= h);
    CHECK(std::abs(min_time(fast, {0.3, 0.3}) - 0.35) <= 3.0 * h);
    for (const Vec2& x : {Vec2(0.3, 0.3), Vec2(-0.71, 0.05), Vec2(0.0, -0.9)}) CHECK(min_time(fast, x) == fast.value(x));

    const DistanceField plain(make_scene(shapes::square()));
    CHECK_THROWS_AS(min_time(plain, {0.0, 0.0}), InputError);
}

TEST_CASE("exit time with a piecewise speed matches a refined grid")
{
    const double h = 0.01;
    const Scene s = make_scene(shapes::square(), two_speed_metric(), std::nullopt, h);
    const DistanceField f(s);
    const auto ref = oracle::square_grid_distance(s.metric, 1.0, h / 4.0);
    for (const Vec2& x : {Vec2(-0.5, 0.2), Vec2(0.5, 0.2), Vec2(0.0, 0.0), Vec2(0.05, -0.1), Vec2(-0.1, 0.6)})
        CHECK(std::abs(min_time(f, x) - ref(x)) <= 3.0 * h);
}

TEST_CASE("HJB residual away from the skeleton")
{
    const double h = 0.01;
    for (double c : {1.0, 2.0}) {
        const DistanceField f(control_square(ConstantControl{c * Mat2::Identity()}, h));
        const HjbReport r = hjb_residual(f);
        CHECK(r.resolution == 201);
        CHECK(r.checked > 30000);
        CHECK(r.excluded > 0);
        CHECK(r.max_residual <= h);
        // Stencils touching the diagonals are skipped.
        CHECK(std::abs(std::abs(r.worst.x()) - std::abs(r.worst.y())) > 2.0 * r.spacing.x());
    }
    const DistanceField plain(make_scene(shapes::square()));
    CHECK_THROWS_AS(hjb_residual(plain), InputError);
}

TEST_CASE("selected velocity is half the Hamiltonian gradient")
{
    Mat2 m;
    m << 1.0, 0.3, -0.2, 1.5;
    const DistanceField f(control_square(ConstantControl{m}, 0.02));
    FlowOptions o;
    o.dt = 1e-2;
    const Trajectory tr = integrate(f, {0.31, -0.17}, 0.8, o);
    const CharacteristicReport r = check_characteristic_form(f, tr);
    CHECK(r.samples == static_cast<int>(tr.samples.size()));
    CHECK(r.max_error <= 1e-12);
}

TEST_CASE("cosh of the distance is semiconcave along lattice geodesics")
{
    const Scene s = make_scene(shapes::square(), MetricField::constant(4.0 * Mat2::Identity()), 0.5);
    const DistanceField f(s);
    const CoshReport r = check_cosh_semiconcavity(f, 200, 11);
    CHECK(r.alpha == 0.5);
    CHECK(r.triples == 200);
    CHECK(r.max_violation <= s.grid_h);
    CHECK_THROWS_AS(check_cosh_semiconcavity(DistanceField(make_scene(shapes::square())), 10, 1), InputError);
}

TEST_CASE("skeleton of the exit time and its retraction")
{
    const DistanceField f(control_square(ConstantControl{2.0 * Mat2::Identity()}, 0.02));
    const SkeletonCloud c = extract_skeleton(f, 33);
    REQUIRE_FALSE(c.points.empty());
    for (const auto& p : c.points) CHECK(std::abs(std::abs(p.x.x()) - std::abs(p.x.y())) <= 2.0 * c.spacing.x());
    const RetractionReport r = check_retraction(f, {.samples = 30, .dt = 2e-2, .skeleton_res = 33});
    CHECK(r.failures == 0);
    CHECK(r.frac_end_singular == 1.0);
    CHECK(r.frac_skeleton_invariant == 1.0);
}

}
