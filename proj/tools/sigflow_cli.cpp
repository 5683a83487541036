#include "sigflow/errors.hpp"
#include "sigflow/mintime.hpp"
#include "sigflow/topology.hpp"
#include "sigflow/verify.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace sigflow;
using nlohmann::ordered_json;

namespace {

// A failed check; maps to exit code 2.
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Args {
    std::string scene;
    std::string point, seed;
    double tmax = 1.0;
    double dt = 1e-3;
    int res = 129;
    int samples = 500;
    std::string out, svg, report;
};

Vec2 parse_point(const std::string& s)
{
    auto comma = s.find(',');
    if (comma == std::string::npos) throw InputError("malformed point literal: " + s);
    double v[2];
    const char* parts[2][2] = {{s.data(), s.data() + comma}, {s.data() + comma + 1, s.data() + s.size()}};
    for (int i = 0; i < 2; ++i) {
        auto [p, ec] = std::from_chars(parts[i][0], parts[i][1], v[i]);
        if (ec != std::errc() || p != parts[i][1] || parts[i][0] == parts[i][1])
            throw InputError("malformed point literal: " + s);
    }
    return {v[0], v[1]};
}

Vec2 required_point(const std::string& s, const char* flag)
{
    if (s.empty()) throw InputError(std::string("missing ") + flag);
    return parse_point(s);
}

// Writes to the file, or to stdout when the path is empty.
template <class F>
void emit(const std::string& path, F&& write)
{
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path);
    write(f);
    if (!f) throw InputError("cannot write " + path);
}

void emit_json(const std::string& path, const ordered_json& j)
{
    emit(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

ordered_json vec(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }

DistanceField load(const Args& a)
{
    if (a.scene.empty()) throw InputError("missing --scene");
    return DistanceField(load_scene(a.scene));
}

void run_distance(const Args& a)
{
    DistanceField field = load(a);
    Vec2 x = required_point(a.point, "--point");
    SuperdiffFan fan = field.fan(x);
    ProjectionSet ps = field.project(x);
    ordered_json proj = ordered_json::array();
    for (const Projection& p : ps.projections) proj.push_back({{"foot", vec(p.foot)}, {"dist", p.dist}});
    ordered_json gens = ordered_json::array();
    for (const Vec2& p : fan.generators) gens.push_back(vec(p));
    emit_json(a.out, {{"point", vec(x)},
                      {"backend", std::string(to_string(field.backend()))},
                      {"delta", fan.delta},
                      {"projections", proj},
                      {"generators", gens},
                      {"velocity", vec(fan.velocity)},
                      {"speed_sq", fan.speed_sq},
                      {"singular", fan.singular},
                      {"ambiguous", fan.ambiguous}});
}

void run_flow(const Args& a)
{
    DistanceField field = load(a);
    Vec2 x = required_point(a.seed, "--seed");
    FlowOptions fo;
    fo.dt = a.dt;
    if (!(a.dt > 0.0) || a.dt > max_step(field)) throw InputError("--dt outside (0, max_step]");
    if (!(a.tmax > 0.0)) throw InputError("--tmax must be positive");
    Trajectory traj = integrate(field, x, a.tmax, fo);
    emit(a.out, [&](std::ostream& o) { write_trajectory_csv(o, traj); });
    if (!a.svg.empty()) emit(a.svg, [&](std::ostream& o) { write_svg(o, field.scene(), nullptr, {&traj, 1}); });
}

void run_skeleton(const Args& a)
{
    DistanceField field = load(a);
    SkeletonCloud cloud = extract_skeleton(field, a.res);
    emit(a.out, [&](std::ostream& o) { write_skeleton_csv(o, cloud); });
    if (!a.svg.empty()) emit(a.svg, [&](std::ostream& o) { write_svg(o, field.scene(), &cloud); });
}

void run_homotopy(const Args& a)
{
    DistanceField field = load(a);
    RetractionOptions ro;
    ro.samples = a.samples;
    ro.skeleton_res = a.res;
    RetractionReport r = check_retraction(field, ro);
    ordered_json j = to_json(r);
    if (!a.point.empty()) {
        Vec2 x = parse_point(a.point);
        FlowOptions fo;
        fo.dt = ro.dt;
        fo.checkpoints = {0.25 * r.horizon, 0.5 * r.horizon, 0.75 * r.horizon};
        Trajectory traj = integrate(field, x, r.horizon, fo);
        ordered_json path = ordered_json::array();
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
            path.push_back({{"t", t}, {"x", vec(traj.position_at(t * r.horizon))}});
        j["point"] = vec(x);
        j["path"] = path;
        if (!a.svg.empty()) {
            SkeletonCloud cloud = extract_skeleton(field, a.res);
            emit(a.svg, [&](std::ostream& o) { write_svg(o, field.scene(), &cloud, {&traj, 1}); });
        }
    } else if (!a.svg.empty()) {
        SkeletonCloud cloud = extract_skeleton(field, a.res);
        emit(a.svg, [&](std::ostream& o) { write_svg(o, field.scene(), &cloud); });
    }
    emit_json(a.report.empty() ? a.out : a.report, j);
    if (r.failures > 0 || r.frac_end_singular < 1.0 || r.frac_skeleton_invariant < 1.0)
        throw CheckFailed("retraction check failed");
}

void run_mintime(const Args& a)
{
    DistanceField field = load(a);
    ordered_json j;
    if (!a.point.empty()) {
        Vec2 x = parse_point(a.point);
        j["point"] = vec(x);
        j["time"] = min_time(field, x);
    }
    if (!a.report.empty() || a.point.empty()) {
        HjbReport h = hjb_residual(field);
        j["hjb"] = {{"resolution", h.resolution},
                    {"checked", h.checked},
                    {"excluded", h.excluded},
                    {"max_residual", h.max_residual},
                    {"mean_residual", h.mean_residual},
                    {"worst", vec(h.worst)},
                    {"constant", h.max_residual / field.scene().grid_h}};
    }
    emit_json(a.report.empty() ? a.out : a.report, j);
}

void run_verify(const Args& a)
{
    DistanceField field = load(a);
    VerifyOptions vo;
    vo.samples = a.samples;
    vo.dt = a.dt;
    VerifyReport r = verify_scene(field, vo);
    emit_json(a.report.empty() ? a.out : a.report, to_json(r));
    if (!r.pass()) throw CheckFailed("verification failed");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distance functions, singular sets and generalized characteristics on polygonal scenes"};
    app.require_subcommand(1);
    Args a;
    auto flags = [&](CLI::App* c) {
        c->add_option("--scene", a.scene, "scene JSON file")->required();
        c->add_option("--point", a.point, "query point X,Y");
        c->add_option("--seed", a.seed, "flow start X,Y");
        c->add_option("--tmax", a.tmax, "flow horizon");
        c->add_option("--dt", a.dt, "time step");
        c->add_option("--res", a.res, "grid resolution");
        c->add_option("--samples", a.samples, "interior samples");
        c->add_option("--out", a.out, "output file (default stdout)");
        c->add_option("--svg", a.svg, "SVG picture");
        c->add_option("--report", a.report, "JSON report file");
        return c;
    };
    struct Command {
        const char* name;
        const char* help;
        void (*run)(const Args&);
    };
    const Command commands[] = {
        {"distance", "distance, projections and superdifferential at --point", run_distance},
        {"flow", "integrate the characteristic from --seed, CSV out", run_flow},
        {"skeleton", "singular grid points at --res, CSV out", run_skeleton},
        {"homotopy", "retraction report; with --point, its path under the homotopy", run_homotopy},
        {"mintime", "exit time at --point and the HJB residual", run_mintime},
        {"verify", "run every applicable check, JSON report; exit 2 on failure", run_verify},
    };
    for (const Command& c : commands) flags(app.add_subcommand(c.name, c.help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "sigflow: %s\n", e.what());
        return 1;
    }
    try {
        for (const Command& c : commands)
            if (app.got_subcommand(c.name)) c.run(a);
    } catch (const CheckFailed& e) {
        std::fprintf(stderr, "sigflow: %s\n", e.what());
        return 2;
    } catch (const FlowError& e) {
        std::fprintf(stderr, "sigflow: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sigflow: %s\n", e.what());
        return 1;
    }
    return 0;
}
