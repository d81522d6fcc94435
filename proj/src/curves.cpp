#include "nerve/curves.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace nerve {

namespace {

constexpr double kUnitTolerance = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool inside_domain(const Vec3& p) { return p.allFinite() && (p.array().abs() <= 1.0).all(); }

double polyline_length(const Polyline& pl) {
    double len = 0.0;
    for (std::size_t i = 1; i < pl.vertices.size(); ++i) len += (pl.vertices[i] - pl.vertices[i - 1]).norm();
    if (pl.closed) len += (pl.vertices.front() - pl.vertices.back()).norm();
    return len;
}

Vec3 eval_polyline(const Polyline& pl, double t) {
    PointList v = pl.vertices;
    if (pl.closed) v.push_back(v.front());
    const double total = polyline_length(pl);
    if (t <= 0.0) return v.front();
    if (t >= 1.0) return v.back();
    double target = t * total;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double seg = (v[i] - v[i - 1]).norm();
        if (target <= seg && seg > 0.0) return v[i - 1] + (target / seg) * (v[i] - v[i - 1]);
        target -= seg;
    }
    return v.back();
}

}  // namespace

std::pair<Vec3, Vec3> circle_frame(const Vec3& normal) {
    const Vec3 n = normal.normalized();
    int axis = 0;
    n.cwiseAbs().minCoeff(&axis);
    const Vec3 u = n.cross(Vec3::Unit(axis)).normalized();
    const Vec3 v = n.cross(u);
    return {u, v};
}

void validate_curve(const Curve& curve) {
    std::visit(overloaded{
                   [](const LineSegment& c) {
                       if (!c.a.allFinite() || !c.b.allFinite()) throw std::invalid_argument("line: non-finite point");
                       if ((c.a - c.b).norm() == 0.0) throw std::invalid_argument("line: zero-length segment");
                   },
                   [](const Circle3D& c) {
                       if (!(c.radius > 0.0) || !std::isfinite(c.radius))
                           throw std::invalid_argument("circle: radius must be positive");
                       if (!c.center.allFinite() || !c.normal.allFinite())
                           throw std::invalid_argument("circle: non-finite geometry");
                       if (std::abs(c.normal.norm() - 1.0) > kUnitTolerance)
                           throw std::invalid_argument("circle: normal must be unit length");
                   },
                   [](const BSplineCurve& c) {
                       if (c.degree < 1) throw std::invalid_argument("bspline: degree must be >= 1");
                       const auto n = c.control_points.size();
                       if (n < static_cast<std::size_t>(c.degree) + 1)
                           throw std::invalid_argument("bspline: needs at least degree+1 control points");
                       if (c.knots.size() != n + c.degree + 1)
                           throw std::invalid_argument("bspline: knot count must be control count + degree + 1");
                       if (!std::is_sorted(c.knots.begin(), c.knots.end()))
                           throw std::invalid_argument("bspline: knots must be nondecreasing");
                       for (int i = 0; i < c.degree; ++i) {
                           if (c.knots[i] != c.knots[i + 1] || c.knots[n + i] != c.knots[n + i + 1])
                               throw std::invalid_argument("bspline: knot vector must be clamped");
                       }
                       if (!(c.knots.back() > c.knots.front())) throw std::invalid_argument("bspline: empty domain");
                       bool distinct = false;
                       for (const auto& p : c.control_points) {
                           if (!p.allFinite()) throw std::invalid_argument("bspline: non-finite control point");
                           distinct = distinct || (p - c.control_points.front()).norm() > 0.0;
                       }
                       if (!distinct) throw std::invalid_argument("bspline: all control points coincide");
                   },
                   [](const Polyline& c) {
                       if (c.vertices.size() < 2) throw std::invalid_argument("polyline: needs at least 2 vertices");
                       for (const auto& p : c.vertices)
                           if (!p.allFinite()) throw std::invalid_argument("polyline: non-finite vertex");
                       if (polyline_length(c) == 0.0) throw std::invalid_argument("polyline: zero length");
                   },
               },
               curve);
}

void validate_curveset(const CurveSet& set) {
    for (std::size_t idx = 0; idx < set.curves.size(); ++idx) {
        const auto& curve = set.curves[idx];
        validate_curve(curve);
        const std::string where = "curve " + std::to_string(idx) + " leaves [-1,1]^3";
        std::visit(overloaded{
                       [&](const LineSegment& c) {
                           if (!inside_domain(c.a) || !inside_domain(c.b)) throw std::invalid_argument(where);
                       },
                       [&](const Circle3D& c) {
                           const Vec3 n = c.normal.normalized();
                           for (int a = 0; a < 3; ++a) {
                               const double reach = c.radius * std::sqrt(std::max(0.0, 1.0 - n[a] * n[a]));
                               if (std::abs(c.center[a]) + reach > 1.0 + 1e-12) throw std::invalid_argument(where);
                           }
                       },
                       [&](const BSplineCurve& c) {
                           for (const auto& p : c.control_points)
                               if (!inside_domain(p)) throw std::invalid_argument(where);
                       },
                       [&](const Polyline& c) {
                           for (const auto& p : c.vertices)
                               if (!inside_domain(p)) throw std::invalid_argument(where);
                       },
                   },
                   curve);
    }
}

bool is_closed(const Curve& curve) {
    if (std::holds_alternative<Circle3D>(curve)) return true;
    if (const auto* pl = std::get_if<Polyline>(&curve)) return pl->closed;
    return false;
}

std::string curve_type_name(const Curve& curve) {
    return std::visit(overloaded{
                          [](const LineSegment&) { return std::string("line"); },
                          [](const Circle3D&) { return std::string("circle"); },
                          [](const BSplineCurve&) { return std::string("bspline"); },
                          [](const Polyline&) { return std::string("polyline"); },
                      },
                      curve);
}

Vec3 eval(const Curve& curve, double t) {
    t = std::clamp(t, 0.0, 1.0);
    return std::visit(overloaded{
                          [&](const LineSegment& c) -> Vec3 { return c.a + t * (c.b - c.a); },
                          [&](const Circle3D& c) -> Vec3 {
                              const auto [u, v] = circle_frame(c.normal);
                              // t = 1 closes the loop exactly at the t = 0 point.
                              const double angle = 2.0 * std::numbers::pi * (t >= 1.0 ? 0.0 : t);
                              return c.center + c.radius * (std::cos(angle) * u + std::sin(angle) * v);
                          },
                          [&](const BSplineCurve& c) -> Vec3 {
                              const double lo = c.knots[c.degree];
                              const double hi = c.knots[c.control_points.size()];
                              return bspline::evaluate(c, lo + t * (hi - lo));
                          },
                          [&](const Polyline& c) -> Vec3 { return eval_polyline(c, t); },
                      },
                      curve);
}

PointList sample_uniform(const Curve& curve, int count) {
    if (count < 2) throw std::invalid_argument("sample count must be >= 2");
    PointList out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(eval(curve, static_cast<double>(i) / (count - 1)));
    return out;
}

namespace bspline {

int find_span(double t, int degree, std::span<const double> knots, int control_count) {
    const int n = control_count - 1;
    if (t >= knots[n + 1]) {
        int s = n;
        while (s > degree && knots[s] == knots[s + 1]) --s;
        return s;
    }
    if (t <= knots[degree]) {
        int s = degree;
        while (s < n && knots[s + 1] <= t) ++s;
        return s;
    }
    const auto it = std::upper_bound(knots.begin() + degree, knots.begin() + n + 1, t);
    return static_cast<int>(it - knots.begin()) - 1;
}

std::vector<double> basis_functions(int span, double t, int degree, std::span<const double> knots) {
    std::vector<double> N(degree + 1, 0.0), left(degree + 1, 0.0), right(degree + 1, 0.0);
    N[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom == 0.0 ? 0.0 : N[r] / denom;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }
    return N;
}

Vec3 evaluate(const BSplineCurve& curve, double u) {
    const int n = static_cast<int>(curve.control_points.size());
    const int p = curve.degree;
    // Clamped ends interpolate the end control points exactly.
    if (u <= curve.knots[p]) return curve.control_points.front();
    if (u >= curve.knots[n]) return curve.control_points.back();
    const int span = find_span(u, p, curve.knots, n);
    const auto N = basis_functions(span, u, p, curve.knots);
    Vec3 out = Vec3::Zero();
    for (int j = 0; j <= p; ++j) out += N[j] * curve.control_points[span - p + j];
    return out;
}

std::vector<double> clamped_uniform_knots(int degree, int interior) {
    std::vector<double> knots(degree + 1, 0.0);
    for (int j = 1; j <= interior; ++j) knots.push_back(static_cast<double>(j) / (interior + 1));
    knots.insert(knots.end(), degree + 1, 1.0);
    return knots;
}

}  // namespace bspline

// ---------------------------------------------------------------------------
// JSON

nlohmann::json vec_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-element coordinate array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json curve_to_json(const Curve& curve) {
    auto points = [](const PointList& pts) {
        auto arr = nlohmann::json::array();
        for (const auto& p : pts) arr.push_back(vec_to_json(p));
        return arr;
    };
    return std::visit(overloaded{
                          [&](const LineSegment& c) {
                              return nlohmann::json{{"type", "line"}, {"a", vec_to_json(c.a)}, {"b", vec_to_json(c.b)}};
                          },
                          [&](const Circle3D& c) {
                              return nlohmann::json{{"type", "circle"},
                                                    {"center", vec_to_json(c.center)},
                                                    {"radius", c.radius},
                                                    {"normal", vec_to_json(c.normal)}};
                          },
                          [&](const BSplineCurve& c) {
                              return nlohmann::json{{"type", "bspline"},
                                                    {"degree", c.degree},
                                                    {"control_points", points(c.control_points)},
                                                    {"knots", c.knots}};
                          },
                          [&](const Polyline& c) {
                              return nlohmann::json{
                                  {"type", "polyline"}, {"vertices", points(c.vertices)}, {"closed", c.closed}};
                          },
                      },
                      curve);
}

Curve curve_from_json(const nlohmann::json& j) {
    try {
        const auto type = j.at("type").get<std::string>();
        auto points = [](const nlohmann::json& arr) {
            PointList out;
            for (const auto& p : arr) out.push_back(vec_from_json(p));
            return out;
        };
        if (type == "line") return LineSegment{vec_from_json(j.at("a")), vec_from_json(j.at("b"))};
        if (type == "circle")
            return Circle3D{vec_from_json(j.at("center")), j.at("radius").get<double>(), vec_from_json(j.at("normal"))};
        if (type == "bspline")
            return BSplineCurve{j.value("degree", 3), points(j.at("control_points")),
                                j.at("knots").get<std::vector<double>>()};
        if (type == "polyline") return Polyline{points(j.at("vertices")), j.value("closed", false)};
        throw FormatError("unknown curve type: " + type);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("curve JSON: ") + e.what());
    }
}

nlohmann::json curveset_to_json(const CurveSet& set) {
    auto arr = nlohmann::json::array();
    for (const auto& c : set.curves) arr.push_back(curve_to_json(c));
    return {{"curves", arr}};
}

CurveSet curveset_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("curves") || !j["curves"].is_array())
        throw FormatError("curve set JSON must be an object with a \"curves\" array");
    CurveSet set;
    for (const auto& c : j["curves"]) set.curves.push_back(curve_from_json(c));
    validate_curveset(set);
    return set;
}

CurveSet load_curveset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NerveError("cannot open curve file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return curveset_from_json(j);
}

}  // namespace nerve
