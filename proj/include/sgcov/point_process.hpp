#pragma once

#include "sgcov/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sgcov {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline double squared_distance(Point a, Point b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double distance(Point a, Point b);
double norm(Point p);

enum class WindowShape { disk, annulus };

// Disk or annulus sampling region. Construct through the factories; both
// validate that the region has positive, finite area.
class Window {
public:
    static Window disk(double radius, Point center = {});
    static Window annulus(double inner_radius, double outer_radius, Point center = {});

    WindowShape shape() const { return shape_; }
    Point center() const { return center_; }
    double inner_radius() const { return inner_; }
    double outer_radius() const { return outer_; }
    double area() const;
    bool contains(Point p) const;

    bool operator==(const Window&) const = default;

private:
    Window(WindowShape shape, Point center, double inner, double outer)
        : shape_(shape), center_(center), inner_(inner), outer_(outer) {}

    WindowShape shape_;
    Point center_;
    double inner_;
    double outer_;
};

// One realization of a point process restricted to a window. Marks are
// real-valued per-point attributes keyed by name.
class PointSample {
public:
    PointSample(Window window, double intensity, std::vector<Point> points = {});

    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Window& window() const { return window_; }
    double intensity_used() const { return intensity_; }

    void set_mark(const std::string& name, std::vector<double> values);
    bool has_mark(const std::string& name) const;
    const std::vector<double>& mark(const std::string& name) const;
    const std::map<std::string, std::vector<double>>& marks() const { return marks_; }

private:
    Window window_;
    double intensity_;
    std::vector<Point> points_;
    std::map<std::string, std::vector<double>> marks_;
};

// Homogeneous PPP on `window`: Poisson(intensity * area) points, i.i.d.
// uniform. The seeded overload builds its own stream; the Rng overload lets
// callers chain draws on one stream.
PointSample sample_ppp(double intensity, const Window& window, std::uint64_t seed);
PointSample sample_ppp(double intensity, const Window& window, Rng& rng);

// P[no point within `radius` of a location] = exp(-intensity * pi * radius^2).
double void_probability(double intensity, double radius);

// Density and CDF of the distance to the nearest point of a planar PPP.
double nearest_distance_pdf(double intensity, double r);
double nearest_distance_cdf(double intensity, double r);

struct Thinning {
    double keep_probability;
};

struct Superposition {
    std::reference_wrapper<const PointSample> other;
};

// x -> x * chi^(-1/alpha) with chi read from the named mark. Displaced
// points that leave the window are dropped.
struct Displacement {
    std::string chi_mark;
    double alpha;
};

using TransformSpec = std::variant<Thinning, Superposition, Displacement>;

PointSample transform(const PointSample& sample, const TransformSpec& spec, std::uint64_t seed = 0);

PointSample thin(const PointSample& sample, double keep_probability, std::uint64_t seed);
PointSample superpose(const PointSample& a, const PointSample& b);
PointSample displace(const PointSample& sample, std::span<const double> chi, double alpha);

using PointFunction = std::function<double(Point)>;

// Sum of f over the sample points.
double campbell_sum(const PointSample& sample, const PointFunction& f);
// Product of f over the sample points; f must take values in (0, 1].
double pgfl_product(const PointSample& sample, const PointFunction& f);

struct Assignment {
    std::vector<std::size_t> site_index;
    std::vector<double> distance;
};

// Nearest-site assignment under the Euclidean metric, ties to the lowest
// site index. Backed by a uniform bucket grid; exact.
Assignment voronoi_assign(std::span<const Point> points, std::span<const Point> sites);

// Reusable nearest-site index over a fixed set of sites.
class NearestSiteIndex {
public:
    explicit NearestSiteIndex(std::span<const Point> sites);

    // Index of the nearest site and squared distance to it.
    std::pair<std::size_t, double> nearest(Point p) const;

private:
    std::span<const Point> sites_;
    double min_x_ = 0.0;
    double min_y_ = 0.0;
    double cell_ = 1.0;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::uint32_t> cell_start_;
    std::vector<std::uint32_t> cell_sites_;
    std::vector<Point> cell_points_;  // sites in bucket order
};

}  // namespace sgcov
