#include "sigflow/scene.hpp"

#include "sigflow/errors.hpp"
#include "sigflow/lattice.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sigflow {

namespace {

using json = nlohmann::json;

std::vector<Vec2> metric_sample_points(const Polygon& poly)
{
    std::vector<Vec2> pts;
    const BoundingBox box = poly.bbox();
    constexpr int n = 24;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const Vec2 p = box.lo + Vec2(box.extent().x() * i / n, box.extent().y() * j / n);
            if (poly.contains(p)) pts.push_back(p);
        }
    return pts;
}

double validate_metric(const Polygon& poly, const MetricField& metric)
{
    double lmin = std::numeric_limits<double>::infinity();
    auto check = [&](const Mat2& a, const std::string& where) {
        if (!a.allFinite() || !is_symmetric(a))
            throw InputError("non-SPD metric: asymmetric or non-finite matrix " + where);
        const double l = symmetric_eigenvalues(a).first;
        if (!(l > 0.0)) throw InputError("non-SPD metric: eigenvalue " + std::to_string(l) + " " + where);
        lmin = std::min(lmin, l);
    };
    if (const auto* s = std::get_if<SampledMetric>(&metric.variant())) {
        const size_t n = static_cast<size_t>(s->nx) * static_cast<size_t>(s->ny);
        if (s->nx < 2 || s->ny < 2 || !(s->h > 0.0) || s->a11.size() != n || s->a12.size() != n || s->a22.size() != n)
            throw InputError("grid_sampled metric: inconsistent lattice dimensions");
        for (size_t k = 0; k < n; ++k) {
            Mat2 a;
            a << s->a11[k], s->a12[k], s->a12[k], s->a22[k];
            check(a, "at lattice sample " + std::to_string(k));
        }
    }
    if (const auto* c = std::get_if<ControlMetric>(&metric.variant())) {
        if (const auto* iso = std::get_if<IsotropicPolyControl>(&c->f.variant())) {
            for (const Vec2& p : metric_sample_points(poly))
                if (!(iso->speed(p) > 0.0)) throw InputError("control_field: isotropic speed is not positive inside the domain");
        }
    }
    for (const Vec2& p : metric_sample_points(poly)) {
        Mat2 a;
        try {
            a = metric.at(p);
        } catch (const InputError& e) {
            throw InputError(std::string("non-SPD metric: ") + e.what());
        }
        check(a, "at interior sample");
    }
    return lmin;
}

Vec2 read_point(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("parse error: expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Mat2 read_matrix(const json& j)
{
    if (!j.is_array() || j.size() != 2) throw InputError("parse error: expected a 2x2 matrix");
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        const Vec2 row = read_point(j[static_cast<size_t>(r)]);
        m(r, 0) = row.x();
        m(r, 1) = row.y();
    }
    return m;
}

ControlSpec parse_control(const json& f)
{
    const std::string variant = f.at("variant").get<std::string>();
    if (variant == "constant_matrix") {
        const Mat2 m = read_matrix(f.at("m"));
        if (std::abs(m.determinant()) <= 1e-300) throw InputError("control_field: det F = 0");
        return ConstantControl{m};
    }
    if (variant == "isotropic_poly") {
        IsotropicPolyControl c;
        c.coeffs = f.at("coeffs").get<std::vector<std::vector<double>>>();
        if (c.coeffs.empty()) throw InputError("control_field: empty coefficient table");
        return c;
    }
    throw InputError("parse error: unknown control variant '" + variant + "'");
}

MetricField parse_metric(const json& m)
{
    const std::string type = m.at("type").get<std::string>();
    if (type == "euclidean") return MetricField::euclidean();
    if (type == "constant_matrix") return MetricField::constant(read_matrix(m.at("a")));
    if (type == "control_field") return MetricField(ControlMetric{parse_control(m.at("f"))});
    if (type == "grid_sampled") {
        SampledMetric s;
        s.origin = read_point(m.at("origin"));
        s.h = m.at("h").get<double>();
        s.nx = m.at("nx").get<int>();
        s.ny = m.at("ny").get<int>();
        s.a11 = m.at("a11").get<std::vector<double>>();
        s.a12 = m.at("a12").get<std::vector<double>>();
        s.a22 = m.at("a22").get<std::vector<double>>();
        return MetricField(s);
    }
    throw InputError("parse error: unknown metric type '" + type + "'");
}

nlohmann::ordered_json matrix_json(const Mat2& m)
{
    return nlohmann::ordered_json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
}

} // namespace

Scene make_scene(Polygon boundary, MetricField metric, std::optional<double> curvature_bound, double grid_h)
{
    if (boundary.size() < 3) throw InputError("polygon has fewer than 3 vertices");
    for (const auto& v : boundary.vertices())
        if (!v.allFinite()) throw InputError("polygon vertex is not finite");
    if (!boundary.is_simple()) throw InputError("non-simple polygon");
    const double area = boundary.signed_area();
    if (area == 0.0) throw InputError("degenerate polygon: zero area");
    if (area < 0.0) throw InputError("clockwise orientation: boundary must be counterclockwise");
    if (curvature_bound && !(*curvature_bound > 0.0)) throw InputError("curvature_bound must be > 0");
    if (!(grid_h > 0.0)) throw InputError("grid_h must be > 0");
    Scene s;
    s.lambda_min = validate_metric(boundary, metric);
    s.boundary = std::move(boundary);
    s.metric = std::move(metric);
    s.curvature_bound = curvature_bound;
    s.grid_h = grid_h;
    return s;
}

Scene parse_scene(const json& j)
{
    try {
        std::vector<Vec2> verts;
        for (const auto& p : j.at("boundary").at("polygon")) verts.push_back(read_point(p));
        MetricField metric = parse_metric(j.at("metric"));
        std::optional<double> alpha;
        if (j.contains("curvature_bound") && !j.at("curvature_bound").is_null())
            alpha = j.at("curvature_bound").get<double>();
        const double h = j.value("grid_h", 0.01);
        return make_scene(Polygon(std::move(verts)), std::move(metric), alpha, h);
    } catch (const json::exception& e) {
        throw InputError(std::string("parse error: ") + e.what());
    }
}

Scene load_scene(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scene file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(std::string("parse error: ") + e.what());
    }
    return parse_scene(j);
}

nlohmann::ordered_json scene_to_json(const Scene& s)
{
    nlohmann::ordered_json j;
    auto poly = nlohmann::ordered_json::array();
    for (const auto& v : s.boundary.vertices()) poly.push_back({v.x(), v.y()});
    j["boundary"]["polygon"] = poly;
    nlohmann::ordered_json m;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, EuclideanMetric>) {
                m["type"] = "euclidean";
            } else if constexpr (std::is_same_v<T, ConstantMetric>) {
                m["type"] = "constant_matrix";
                m["a"] = matrix_json(v.a);
            } else if constexpr (std::is_same_v<T, ControlMetric>) {
                m["type"] = "control_field";
                if (const auto* c = std::get_if<ConstantControl>(&v.f.variant())) {
                    m["f"]["variant"] = "constant_matrix";
                    m["f"]["m"] = matrix_json(c->m);
                } else {
                    m["f"]["variant"] = "isotropic_poly";
                    m["f"]["coeffs"] = std::get<IsotropicPolyControl>(v.f.variant()).coeffs;
                }
            } else {
                m["type"] = "grid_sampled";
                m["origin"] = {v.origin.x(), v.origin.y()};
                m["h"] = v.h;
                m["nx"] = v.nx;
                m["ny"] = v.ny;
                m["a11"] = v.a11;
                m["a12"] = v.a12;
                m["a22"] = v.a22;
            }
        },
        s.metric.variant());
    j["metric"] = m;
    if (s.curvature_bound) j["curvature_bound"] = *s.curvature_bound;
    j["grid_h"] = s.grid_h;
    return j;
}

void save_scene(const Scene& s, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write scene file '" + path.string() + "'");
    out << scene_to_json(s).dump(2) << '\n';
}

double diameter(const Scene& s)
{
    const auto& v = s.boundary.vertices();
    if (s.metric.is_constant()) {
        const Mat2 a = s.metric.at(v.front());
        double best = 0.0;
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = i + 1; j < v.size(); ++j) best = std::max(best, metric_norm(a, v[i] - v[j]));
        return best;
    }
    return lattice_diameter(s.boundary, s.metric, 0.5 * s.grid_h);
}

} // namespace sigflow
