#include "nerve/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace nerve {

namespace {

BSplineCurve elevate_to_cubic_bezier(const Vec3& a, const Vec3& b, const Vec3& c) {
    // Quadratic Bezier (a, b, c) written as a cubic.
    return {kSplineDegree, {a, (a + 2.0 * b) / 3.0, (2.0 * b + c) / 3.0, c}, bspline::clamped_uniform_knots(3, 0)};
}

double rms_distance(const BSplineCurve& curve, std::span<const Vec3> points, std::span<const double> params) {
    double sum = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) sum += (bspline::evaluate(curve, params[k]) - points[k]).squaredNorm();
    return std::sqrt(sum / static_cast<double>(points.size()));
}

}  // namespace

Curve ParametricCurve::as_curve() const {
    return std::visit([](const auto& s) -> Curve { return s; }, shape);
}

std::vector<double> chord_length_parameters(std::span<const Vec3> points) {
    std::vector<double> u(points.size(), 0.0);
    for (std::size_t k = 1; k < points.size(); ++k) u[k] = u[k - 1] + (points[k] - points[k - 1]).norm();
    const double total = points.empty() ? 0.0 : u.back();
    if (!(total > 0.0)) throw std::invalid_argument("cannot parameterize coincident points");
    for (auto& x : u) x /= total;
    u.back() = 1.0;
    return u;
}

int interior_knot_count(int n) { return std::clamp(n / 2, 0, std::max(0, n - 4)); }

ParametricCurve fit_bspline(std::span<const Vec3> points) {
    if (points.size() < 2) throw std::invalid_argument("spline fit needs at least two points");
    const auto u = chord_length_parameters(points);
    return fit_bspline(points, u);
}

ParametricCurve fit_bspline(std::span<const Vec3> points, std::span<const double> u) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("spline fit needs at least two points");
    if (u.size() != points.size() || u.front() != 0.0 || u.back() != 1.0 || !std::is_sorted(u.begin(), u.end()))
        throw std::invalid_argument("spline fit: parameters must rise from 0 to 1, one per point");
    const Vec3& first = points.front();
    const Vec3& last = points.back();

    if (n < 4) {
        BSplineCurve curve;
        if (n == 3 && u[1] > 0.0 && u[1] < 1.0) {
            const double s = u[1];
            const Vec3 mid = (points[1] - (1 - s) * (1 - s) * first - s * s * last) / (2.0 * s * (1 - s));
            curve = elevate_to_cubic_bezier(first, mid, last);
        } else {
            curve = elevate_to_cubic_bezier(first, 0.5 * (first + last), last);
        }
        return {curve, rms_distance(curve, points, u)};
    }

    const int interior = interior_knot_count(n);
    BSplineCurve curve{kSplineDegree, {}, bspline::clamped_uniform_knots(kSplineDegree, interior)};
    const int ncp = interior + kSplineDegree + 1;
    const int nfree = ncp - 2;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, nfree);
    Eigen::MatrixXd rhs(n, 3);
    for (int k = 0; k < n; ++k) {
        const int span = bspline::find_span(u[k], kSplineDegree, curve.knots, ncp);
        const auto N = bspline::basis_functions(span, u[k], kSplineDegree, curve.knots);
        Vec3 target = points[k];
        for (int j = 0; j <= kSplineDegree; ++j) {
            const int col = span - kSplineDegree + j;
            if (col == 0) {
                target -= N[j] * first;
            } else if (col == ncp - 1) {
                target -= N[j] * last;
            } else {
                A(k, col - 1) = N[j];
            }
        }
        rhs.row(k) = target.transpose();
    }
    Eigen::MatrixXd free;
    const auto cod = A.completeOrthogonalDecomposition();
    if (cod.rank() == nfree) {
        free = cod.solve(rhs);
    } else {
        // Knot spans without data leave control points undetermined. A faint
        // second-difference penalty pins them to their neighbors instead of
        // letting the minimum-norm solution pull them toward the origin.
        const double w = 1e-6;
        Eigen::MatrixXd Aa = Eigen::MatrixXd::Zero(n + ncp - 2, nfree);
        Eigen::MatrixXd ra = Eigen::MatrixXd::Zero(n + ncp - 2, 3);
        Aa.topRows(n) = A;
        ra.topRows(n) = rhs;
        for (int i = 1; i + 1 < ncp; ++i) {
            const int row = n + i - 1;
            const double coeff[3] = {w, -2.0 * w, w};
            for (int d = -1; d <= 1; ++d) {
                const int col = i + d;
                if (col == 0) {
                    ra.row(row) -= coeff[d + 1] * first.transpose();
                } else if (col == ncp - 1) {
                    ra.row(row) -= coeff[d + 1] * last.transpose();
                } else {
                    Aa(row, col - 1) = coeff[d + 1];
                }
            }
        }
        free = Aa.colPivHouseholderQr().solve(ra);
    }

    curve.control_points.reserve(ncp);
    curve.control_points.push_back(first);
    for (int i = 0; i < nfree; ++i) curve.control_points.push_back(free.row(i).transpose());
    curve.control_points.push_back(last);
    return {curve, rms_distance(curve, points, u)};
}

ParametricCurve fit_circle(std::span<const Vec3> points) {
    const auto n = points.size();
    if (n < 3) throw std::invalid_argument("circle fit needs at least three points");
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : points) centroid += p;
    centroid /= static_cast<double>(n);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : points) cov += (p - centroid) * (p - centroid).transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> pca(cov);
    const auto& ev = pca.eigenvalues();  // ascending
    if (!(ev(2) > 0.0) || ev(1) <= 1e-12 * ev(2)) throw std::invalid_argument("circle fit: points are collinear");

    Vec3 normal = pca.eigenvectors().col(0);
    const Vec3 ax = pca.eigenvectors().col(2);
    const Vec3 ay = normal.cross(ax);

    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 d = points[k] - centroid;
        const double x = d.dot(ax);
        const double y = d.dot(ay);
        A.row(k) << 2.0 * x, 2.0 * y, 1.0;
        b(k) = x * x + y * y;
    }
    const auto qr = A.colPivHouseholderQr();
    if (qr.rank() < 3) throw std::invalid_argument("circle fit: degenerate in-plane configuration");
    const Eigen::Vector3d sol = qr.solve(b);
    const double r2 = sol(2) + sol(0) * sol(0) + sol(1) * sol(1);
    if (!(r2 > 0.0)) throw std::invalid_argument("circle fit: no real circle");

    Circle3D circle{centroid + sol(0) * ax + sol(1) * ay, std::sqrt(r2), normal};
    double turn = 0.0;
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 d = points[k] - circle.center;
        const double h = d.dot(normal);
        const double rho = (d - h * normal).norm();
        sq += (rho - circle.radius) * (rho - circle.radius) + h * h;
        turn += d.cross(points[(k + 1) % n] - circle.center).dot(normal);
    }
    if (turn < 0.0) circle.normal = -normal;
    return {circle, std::sqrt(sq / static_cast<double>(n))};
}

ParametricCurve fit_path(const CurvePath& path, std::span<const Vec3> positions, double circle_threshold) {
    PointList pts;
    pts.reserve(path.vertices.size() + 1);
    for (VertexId v : path.vertices) pts.push_back(positions[v]);
    if (!path.closed) return fit_bspline(pts);
    try {
        auto circle = fit_circle(pts);
        if (circle.residual < circle_threshold) return circle;
    } catch (const std::invalid_argument&) {
        // Not a circle; fall through to the spline.
    }
    pts.push_back(pts.front());
    return fit_bspline(pts);
}

ParametricCurve fit_path(const CurvePath& path, const PwlGraph& graph, double circle_threshold) {
    const auto positions = graph.positions();
    return fit_path(path, positions, circle_threshold);
}

Vec3 eval_curve(const ParametricCurve& curve, double t) { return eval(curve.as_curve(), t); }

PointList sample_fitted(const ParametricCurve& curve, int count) { return sample_uniform(curve.as_curve(), count); }

nlohmann::json fitted_to_json(std::span<const ParametricCurve> curves) {
    auto arr = nlohmann::json::array();
    for (const auto& c : curves) {
        auto j = curve_to_json(c.as_curve());
        j["residual"] = c.residual;
        arr.push_back(std::move(j));
    }
    return {{"curves", arr}};
}

std::vector<ParametricCurve> fitted_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("curves") || !j["curves"].is_array())
        throw FormatError("fitted curves JSON must be an object with a \"curves\" array");
    std::vector<ParametricCurve> out;
    for (const auto& item : j["curves"]) {
        const Curve c = curve_from_json(item);
        validate_curve(c);
        const double residual = item.value("residual", 0.0);
        if (const auto* s = std::get_if<BSplineCurve>(&c)) {
            out.push_back({*s, residual});
        } else if (const auto* circle = std::get_if<Circle3D>(&c)) {
            out.push_back({*circle, residual});
        } else {
            throw FormatError("fitted curves must be bspline or circle");
        }
    }
    return out;
}

}  // namespace nerve
