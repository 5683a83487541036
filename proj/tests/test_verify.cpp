#include "sigflow/errors.hpp"
#include "sigflow/mintime.hpp"
#include "sigflow/shapes.hpp"
#include "sigflow/verify.hpp"

#include <doctest.h>

using namespace sigflow;

namespace {

VerifyOptions small()
{
    VerifyOptions o;
    o.battery = 12;
    o.bound_seeds = 6;
    o.pairs = 300;
    o.eikonal_points = 50;
    o.samples = 40;
    o.dt = 1e-2;
    return o;
}

const CheckResult& find(const VerifyReport& r, const std::string& name)
{
    for (const CheckResult& c : r.checks)
        if (c.name == name) return c;
    FAIL("missing check " << name);
    return r.checks.front();
}

FlowSample sample(double t, bool singular)
{
    FlowSample s;
    s.t = t;
    s.singular = singular;
    return s;
}

} // namespace

TEST_SUITE("verify") {

TEST_CASE("first exit from the singular set")
{
    Trajectory t;
    CHECK(first_sigma_exit(t) == -1);
    t.samples = {sample(0, false), sample(1, false), sample(2, true), sample(3, true)};
    CHECK(first_sigma_exit(t) == -1);
    t.samples.push_back(sample(4, false));
    CHECK(first_sigma_exit(t) == 4);
    t.samples = {sample(0, true), sample(1, false), sample(2, true)};
    CHECK(first_sigma_exit(t) == 1);
}

TEST_CASE("square passes every Euclidean check")
{
    const DistanceField f(make_scene(shapes::square()));
    VerifyReport r = verify_scene(f, small());
    CHECK(r.pass());
    for (const char* name : {"semiconcavity", "eikonal_saturation", "sigma_invariance", "speed_bound", "retraction"})
        CHECK(find(r, name).status == CheckStatus::pass);
    CHECK(find(r, "hjb_residual").status == CheckStatus::skipped);
    CHECK(find(r, "sigma_invariance").detail["trajectories"] == 12);
    CHECK(find(r, "semiconcavity").detail["pairs_checked"].get<int>() > 0);
}

TEST_CASE("report does not depend on the execution policy")
{
    const DistanceField f(make_scene(shapes::lshape()));
    const VerifyOptions o = small();
    CHECK(to_json(verify_scene(f, o, Execution::serial)).dump() == to_json(verify_scene(f, o, Execution::parallel)).dump());
}

TEST_CASE("control scene runs the HJB check and skips the Euclidean-only ones")
{
    const DistanceField f(make_scene(shapes::square(), metric_from_control(ConstantControl{2.0 * Mat2::Identity()}),
                                     std::nullopt, 0.02));
    VerifyReport r = verify_scene(f, small());
    CHECK(find(r, "hjb_residual").status == CheckStatus::pass);
    CHECK(find(r, "semiconcavity").status == CheckStatus::skipped);
    CHECK(find(r, "speed_bound").status == CheckStatus::skipped);
    CHECK(r.pass());
}

TEST_CASE("a failing check fails the report")
{
    IsotropicPolyControl c;
    c.coeffs = {{1.0}, {0.0}, {1.0}};
    const DistanceField f(make_scene(shapes::square(), metric_from_control(c), std::nullopt, 0.02));
    VerifyOptions o = small();
    o.hjb_constant = 1e-3;
    VerifyReport r = verify_scene(f, o);
    CHECK(find(r, "hjb_residual").status == CheckStatus::fail);
    CHECK_FALSE(r.pass());
    CHECK(to_json(r)["pass"] == false);
}

TEST_CASE("option validation")
{
    const DistanceField f(make_scene(shapes::square()));
    VerifyOptions o = small();
    o.dt = 0.0;
    CHECK_THROWS_AS(verify_scene(f, o), InputError);
    o = small();
    o.dt = 10.0;
    CHECK_THROWS_AS(verify_scene(f, o), InputError);
    o = small();
    o.battery = 0;
    CHECK_THROWS_AS(verify_scene(f, o), InputError);
}

}
