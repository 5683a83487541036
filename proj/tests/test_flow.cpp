#include "sigflow/errors.hpp"
#include "sigflow/flow.hpp"
#include "sigflow/shapes.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace sigflow;

namespace {

const DistanceField& square_field()
{
    static const DistanceField f(make_scene(shapes::square()));
    return f;
}

const DistanceField& disk_field()
{
    static const DistanceField f(make_scene(shapes::regular(256)));
    return f;
}

FlowOptions with_dt(double dt)
{
    FlowOptions o;
    o.dt = dt;
    return o;
}

// Once singular, singular for good; delta never decreases.
void check_trajectory_invariants(const Trajectory& tr)
{
    bool seen = false;
    for (size_t k = 0; k < tr.samples.size(); ++k) {
        const auto& s = tr.samples[k];
        if (seen) CHECK(s.singular);
        seen = seen || s.singular;
        CHECK(s.speed_sq <= 1.0 + 1e-9);
        if (k > 0) {
            CHECK(s.t > tr.samples[k - 1].t);
            CHECK(s.delta >= tr.samples[k - 1].delta - 1e-9);
        }
    }
}

} // namespace

TEST_SUITE("flow") {

TEST_CASE("square diagonal start moves along the diagonal at half speed")
{
    const Trajectory tr = integrate(square_field(), Vec2(0.3, 0.3), 2.0, with_dt(1e-3));
    for (const auto& s : tr.samples) {
        const double c = std::max(0.0, 0.3 - s.t / 2.0);
        CHECK((s.x - Vec2(c, c)).norm() <= 1e-6);
        if (s.t < 0.599) {
            CHECK(s.speed_sq == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(s.singular);
        }
    }
    REQUIRE(tr.halt_time.has_value());
    CHECK(*tr.halt_time == doctest::Approx(0.6).epsilon(1e-5));
    CHECK(tr.samples.back().t == 2.0);
    check_trajectory_invariants(tr);
}

TEST_CASE("square off-diagonal start: straight to the diagonal, then along it")
{
    // Closed form: x = (0.5 - t, 0.1) until t = 0.4, then (0.1 - (t - 0.4)/2) (1, 1) until t = 0.6.
    auto closed = [](double t) {
        if (t <= 0.4) return Vec2(0.5 - t, 0.1);
        const double c = std::max(0.0, 0.1 - (t - 0.4) / 2.0);
        return Vec2(c, c);
    };
    const Trajectory tr = integrate(square_field(), Vec2(0.5, 0.1), 4.0 * std::sqrt(2.0), with_dt(1e-4));
    for (const double t : {0.1, 0.3, 0.4, 0.45, 0.5, 0.59, 0.7, 3.0}) CHECK((tr.position_at(t) - closed(t)).norm() <= 1e-3);
    CHECK(tr.samples.back().x.norm() <= 1e-3);
    for (size_t k = 1; k < tr.samples.size(); ++k)
        if (!tr.halt_time || tr.samples[k].t <= *tr.halt_time) CHECK(tr.samples[k].delta > tr.samples[k - 1].delta);
    check_trajectory_invariants(tr);
}

TEST_CASE("disk trajectory is radial and parks at the centre")
{
    const Trajectory tr = integrate(disk_field(), Vec2(0.5, 0), 2.0, with_dt(1e-3));
    for (const auto& s : tr.samples)
        if (s.t <= 0.49) CHECK((s.x - Vec2(0.5 - s.t, 0)).norm() <= 1e-3);
    CHECK(tr.samples.back().x.norm() <= 1e-3);
    CHECK(tr.samples.back().singular);
    check_trajectory_invariants(tr);
}

TEST_CASE("trajectories on curved and polygonal skeletons keep their invariants")
{
    const DistanceField lshape(make_scene(shapes::lshape()));
    const DistanceField ellipse(make_scene(shapes::ellipse(512, 2, 1)));
    for (const Vec2& x : {Vec2(1.5, 0.3), Vec2(0.2, 0.9), Vec2(0.7, 0.35), Vec2(0.3, 1.8)})
        check_trajectory_invariants(integrate(lshape, x, 2.0 * lshape.diameter(), with_dt(1e-3)));
    for (const Vec2& x : {Vec2(0.3, 0.4), Vec2(1.7, 0.2), Vec2(-1.0, -0.5)})
        check_trajectory_invariants(integrate(ellipse, x, 4.0, with_dt(1e-3)));
    for (const Vec2& x : {Vec2(0.3, 0.4), Vec2(-0.6, 0.1)}) check_trajectory_invariants(integrate(disk_field(), x, 2.0, with_dt(1e-3)));
}

TEST_CASE("checkpoints appear exactly among the samples")
{
    FlowOptions o = with_dt(3e-3);
    o.checkpoints = {0.25, 0.5, 0.75, 1.0};
    const Trajectory tr = integrate(square_field(), Vec2(0.6, -0.2), 1.0, o);
    for (const double c : o.checkpoints) {
        const bool found = std::any_of(tr.samples.begin(), tr.samples.end(), [&](const FlowSample& s) { return s.t == c; });
        CHECK(found);
    }
}

TEST_CASE("integration preconditions")
{
    CHECK_THROWS_AS(integrate(square_field(), Vec2(2, 0), 1.0), DomainError);
    CHECK_THROWS_AS(integrate(square_field(), Vec2(0.5, 0), 1.0, with_dt(1.0)), InputError);
    CHECK_THROWS_AS(integrate(square_field(), Vec2(0.5, 0), -1.0), InputError);
    CHECK(max_step(square_field()) == doctest::Approx(0.1 * 2.0 * std::sqrt(2.0)));
}

TEST_CASE("singularity test")
{
    auto r = is_singular(square_field(), Vec2(0.5, 0));
    CHECK(r.cls == PointClass::regular);
    CHECK(r.speed_sq == 1.0);
    r = is_singular(square_field(), Vec2(0.3, 0.3));
    CHECK(r.cls == PointClass::singular);
    CHECK(r.speed_sq == doctest::Approx(0.5));
    const DistanceField ellipse(make_scene(shapes::ellipse(512, 2, 1)));
    CHECK(is_singular(ellipse, Vec2(1.0, 0)).singular());
    CHECK_FALSE(is_singular(ellipse, Vec2(1.0, 0.2)).singular());
    // A polygonal spoke of the disk (towards a vertex): two generators 2 pi / 256 apart, too close to call singular.
    const double t = std::numbers::pi / 256.0;
    CHECK(is_singular(disk_field(), 0.5 * Vec2(std::cos(t), std::sin(t))).cls == PointClass::ambiguous);
}

TEST_CASE("speed bound along the square diagonal")
{
    const Scene s = make_scene(shapes::square());
    const Trajectory tr = integrate(square_field(), Vec2(0.3, 0.3), 1.0, with_dt(1e-3));
    const BoundReport b = verify_speed_bound(tr, s);
    CHECK(b.pass);
    CHECK_FALSE(b.riemannian);
    for (size_t k = 0; k < b.t.size(); ++k) {
        CHECK(b.bound[k] >= b.s0);
        CHECK(b.bound[k] < 1.0);
        if (k > 0) CHECK(b.integral[k] >= b.integral[k - 1]);
        // delta = 0.7 + t/2 until the centre is reached at t = 0.6.
        if (b.t[k] <= 0.6) CHECK(std::abs(b.integral[k] - 4.0 * std::log(1.0 + b.t[k] / 1.4)) <= 1e-4);
    }
}

TEST_CASE("speed bound degenerate and Riemannian cases")
{
    const Scene s = make_scene(shapes::square());
    const BoundReport zero = verify_speed_bound(integrate(square_field(), Vec2(0, 0), 1.0), s);
    CHECK(zero.pass);
    for (const double b : zero.bound) CHECK(b == 0.0);

    const Scene metric = make_scene(shapes::square(), MetricField::constant(4.0 * Mat2::Identity()), 0.5);
    const DistanceField f(metric);
    const BoundReport r = verify_speed_bound(integrate(f, Vec2(0.3, 0.3), 2.0, with_dt(1e-3)), metric);
    CHECK(r.riemannian);
    CHECK(r.pass);
    CHECK(r.min_margin >= 0.0);

    CHECK_THROWS_AS(verify_speed_bound(integrate(square_field(), Vec2(0.5, 0), 0.1), s), InputError);
    const Scene no_alpha = make_scene(shapes::square(), MetricField::constant(4.0 * Mat2::Identity()));
    CHECK_THROWS_AS(verify_speed_bound(integrate(DistanceField(no_alpha), Vec2(0.3, 0.3), 0.1), no_alpha), InputError);
    CHECK(logistic_bound(0.5, 0.0) == 0.5);
    CHECK(logistic_bound(0.5, 1e6) == 1.0);
}

TEST_CASE("semiconcavity pairs")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.999, 0.999);
    std::vector<std::pair<Vec2, Vec2>> pairs;
    for (int k = 0; k < 100; ++k) pairs.emplace_back(Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)));
    const auto r = check_semiconcavity_pairs(square_field(), pairs);
    CHECK(r.pass);
    CHECK(r.max_violation <= 1e-9);
    CHECK(r.pairs_checked == 100);

    const std::vector<std::pair<Vec2, Vec2>> same{{Vec2(0.2, 0.1), Vec2(0.2, 0.1)}};
    CHECK(check_semiconcavity_pairs(square_field(), same).max_violation == 0.0);

    // Straddling the diagonal: every generator pairing is tested, including crossed ones.
    const std::vector<std::pair<Vec2, Vec2>> straddle{{Vec2(0.3, 0.3), Vec2(0.35, 0.25)}, {Vec2(0.3, 0.31), Vec2(0.31, 0.3)}};
    CHECK(check_semiconcavity_pairs(square_field(), straddle).max_violation <= 1e-9);
}

TEST_CASE("continuous dependence on the starting point")
{
    const auto disk = check_continuous_dependence(disk_field(), Vec2(0.5, 0), 1e-3, 2.0, with_dt(1e-3), 8, 1.0 + 1e-6);
    CHECK(disk.seeds == 8);
    CHECK(disk.pass);
    CHECK(check_continuous_dependence(disk_field(), Vec2(0.5, 0), 0.0, 2.0).max_ratio == 0.0);
    // Baseline recorded from the first verified run: 1 + 3.1e-14.
    const auto sq = check_continuous_dependence(square_field(), Vec2(0.5, 0.1), 1e-3, 4.0 * std::sqrt(2.0), with_dt(1e-3), 8, 1.0 + 1e-9);
    CHECK(sq.pass);
}

TEST_CASE("trajectory csv")
{
    const Trajectory tr = integrate(square_field(), Vec2(0.3, 0.3), 0.01, with_dt(5e-3));
    std::ostringstream out;
    write_trajectory_csv(out, tr);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,y,vx,vy,delta,speed_sq,singular");
    std::getline(in, line);
    CHECK(line == "0,0.29999999999999999,0.29999999999999999,-0.5,-0.5,0.69999999999999996,0.5,1");
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == static_cast<int>(tr.samples.size()));
}

} // TEST_SUITE
