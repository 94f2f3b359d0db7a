#include "sgcov/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sgcov {

namespace {

constexpr double kPi = std::numbers::pi;

void require_intensity(double intensity)
{
    if (!(intensity > 0.0) || !std::isfinite(intensity)) {
        throw std::invalid_argument("intensity must be positive and finite");
    }
}

}  // namespace

double distance(Point a, Point b) { return std::sqrt(squared_distance(a, b)); }

double norm(Point p) { return std::hypot(p.x, p.y); }

Window Window::disk(double radius, Point center)
{
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("disk window needs a finite positive radius");
    }
    return Window(WindowShape::disk, center, 0.0, radius);
}

Window Window::annulus(double inner_radius, double outer_radius, Point center)
{
    if (!(inner_radius >= 0.0) || !std::isfinite(outer_radius) || !(outer_radius > inner_radius)) {
        throw std::invalid_argument("annulus window needs 0 <= inner < outer < inf");
    }
    return Window(WindowShape::annulus, center, inner_radius, outer_radius);
}

double Window::area() const { return kPi * (outer_ * outer_ - inner_ * inner_); }

bool Window::contains(Point p) const
{
    const double d2 = squared_distance(p, center_);
    return d2 <= outer_ * outer_ && d2 >= inner_ * inner_;
}

PointSample::PointSample(Window window, double intensity, std::vector<Point> points)
    : window_(window), intensity_(intensity), points_(std::move(points))
{
    for (const Point& p : points_) {
        if (!window_.contains(p)) throw std::invalid_argument("point lies outside the sample window");
    }
}

void PointSample::set_mark(const std::string& name, std::vector<double> values)
{
    if (values.size() != points_.size()) {
        throw std::invalid_argument("mark '" + name + "' length does not match point count");
    }
    marks_[name] = std::move(values);
}

bool PointSample::has_mark(const std::string& name) const { return marks_.contains(name); }

const std::vector<double>& PointSample::mark(const std::string& name) const
{
    const auto it = marks_.find(name);
    if (it == marks_.end()) throw std::out_of_range("no mark named '" + name + "'");
    return it->second;
}

PointSample sample_ppp(double intensity, const Window& window, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_ppp(intensity, window, rng);
}

PointSample sample_ppp(double intensity, const Window& window, Rng& rng)
{
    require_intensity(intensity);
    const std::uint64_t count = rng.poisson(intensity * window.area());
    std::vector<Point> points;
    points.reserve(count);
    const double inner2 = window.inner_radius() * window.inner_radius();
    const double outer2 = window.outer_radius() * window.outer_radius();
    const Point c = window.center();
    if (inner2 == 0.0) {
        // Disk: rejection from the bounding square avoids the trig calls.
        const double r_out = window.outer_radius();
        while (points.size() < count) {
            const double x = r_out * (2.0 * rng.uniform() - 1.0);
            const double y = r_out * (2.0 * rng.uniform() - 1.0);
            if (x * x + y * y >= outer2) continue;
            const Point p{c.x + x, c.y + y};
            if (window.contains(p)) points.push_back(p);
        }
        return PointSample(window, intensity, std::move(points));
    }
    for (std::uint64_t n = 0; n < count; ++n) {
        // Radius by inverse CDF of the area measure; angle uniform.
        const double r = std::sqrt(inner2 + (outer2 - inner2) * rng.uniform());
        const double theta = 2.0 * kPi * rng.uniform();
        Point p{c.x + r * std::cos(theta), c.y + r * std::sin(theta)};
        // Rounding can leave a point one ulp outside a rim; nudge it back.
        for (int attempt = 0; attempt < 8 && !window.contains(p); ++attempt) {
            const double d2 = squared_distance(p, c);
            const double nudge = d2 > outer2 ? 1.0 - 1e-15 : 1.0 + 1e-15;
            p = {c.x + (p.x - c.x) * nudge, c.y + (p.y - c.y) * nudge};
        }
        points.push_back(p);
    }
    return PointSample(window, intensity, std::move(points));
}

double void_probability(double intensity, double radius)
{
    require_intensity(intensity);
    if (!(radius >= 0.0)) throw std::invalid_argument("void_probability: radius must be >= 0");
    return std::exp(-intensity * kPi * radius * radius);
}

double nearest_distance_pdf(double intensity, double r)
{
    require_intensity(intensity);
    if (!(r >= 0.0)) throw std::invalid_argument("nearest_distance_pdf: r must be >= 0");
    return 2.0 * kPi * intensity * r * std::exp(-intensity * kPi * r * r);
}

double nearest_distance_cdf(double intensity, double r)
{
    require_intensity(intensity);
    if (!(r >= 0.0)) throw std::invalid_argument("nearest_distance_cdf: r must be >= 0");
    return -std::expm1(-intensity * kPi * r * r);
}

PointSample thin(const PointSample& sample, double keep_probability, std::uint64_t seed)
{
    if (!(keep_probability >= 0.0 && keep_probability <= 1.0)) {
        throw std::invalid_argument("thinning probability must lie in [0, 1]");
    }
    Rng rng(seed);
    std::vector<std::size_t> kept;
    kept.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (rng.uniform() < keep_probability) kept.push_back(i);
    }
    std::vector<Point> points;
    points.reserve(kept.size());
    for (std::size_t i : kept) points.push_back(sample.points()[i]);
    PointSample out(sample.window(), sample.intensity_used() * keep_probability, std::move(points));
    for (const auto& [name, values] : sample.marks()) {
        std::vector<double> subset;
        subset.reserve(kept.size());
        for (std::size_t i : kept) subset.push_back(values[i]);
        out.set_mark(name, std::move(subset));
    }
    return out;
}

PointSample superpose(const PointSample& a, const PointSample& b)
{
    if (!(a.window() == b.window())) throw std::invalid_argument("superposed samples must share a window");
    std::vector<Point> points = a.points();
    points.insert(points.end(), b.points().begin(), b.points().end());
    PointSample out(a.window(), a.intensity_used() + b.intensity_used(), std::move(points));
    for (const auto& [name, values] : a.marks()) {
        if (!b.has_mark(name)) continue;
        std::vector<double> merged = values;
        const auto& other = b.mark(name);
        merged.insert(merged.end(), other.begin(), other.end());
        out.set_mark(name, std::move(merged));
    }
    return out;
}

PointSample displace(const PointSample& sample, std::span<const double> chi, double alpha)
{
    if (chi.size() != sample.size()) throw std::invalid_argument("displacement marks must match point count");
    if (!(alpha > 0.0)) throw std::invalid_argument("displacement exponent must be positive");
    const Point c = sample.window().center();
    std::vector<Point> points;
    std::vector<std::size_t> kept;
    double moment = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!(chi[i] > 0.0) || !std::isfinite(chi[i])) {
            throw std::invalid_argument("displacement marks must be positive and finite");
        }
        moment += std::pow(chi[i], 2.0 / alpha);
        const double scale = std::pow(chi[i], -1.0 / alpha);
        const Point& p = sample.points()[i];
        const Point q = scale == 1.0 ? p : Point{c.x + (p.x - c.x) * scale, c.y + (p.y - c.y) * scale};
        if (!std::isfinite(q.x) || !std::isfinite(q.y)) throw std::invalid_argument("displacement produced a non-finite point");
        if (sample.window().contains(q)) {
            points.push_back(q);
            kept.push_back(i);
        }
    }
    const double mean_moment = sample.empty() ? 1.0 : moment / static_cast<double>(sample.size());
    PointSample out(sample.window(), sample.intensity_used() * mean_moment, std::move(points));
    for (const auto& [name, values] : sample.marks()) {
        std::vector<double> subset;
        subset.reserve(kept.size());
        for (std::size_t i : kept) subset.push_back(values[i]);
        out.set_mark(name, std::move(subset));
    }
    return out;
}

PointSample transform(const PointSample& sample, const TransformSpec& spec, std::uint64_t seed)
{
    return std::visit(
        [&](const auto& op) -> PointSample {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Thinning>) {
                return thin(sample, op.keep_probability, seed);
            } else if constexpr (std::is_same_v<T, Superposition>) {
                return superpose(sample, op.other.get());
            } else {
                return displace(sample, sample.mark(op.chi_mark), op.alpha);
            }
        },
        spec);
}

double campbell_sum(const PointSample& sample, const PointFunction& f)
{
    double total = 0.0;
    for (const Point& p : sample.points()) {
        const double v = f(p);
        if (!std::isfinite(v)) throw std::domain_error("campbell_sum: non-finite function value");
        total += v;
    }
    return total;
}

double pgfl_product(const PointSample& sample, const PointFunction& f)
{
    double product = 1.0;
    for (const Point& p : sample.points()) {
        const double v = f(p);
        if (!(v > 0.0 && v <= 1.0)) throw std::domain_error("pgfl_product: function value outside (0, 1]");
        product *= v;
    }
    return product;
}

NearestSiteIndex::NearestSiteIndex(std::span<const Point> sites) : sites_(sites)
{
    if (sites.empty()) throw std::invalid_argument("nearest-site search needs at least one site");
    double max_x = sites[0].x;
    double max_y = sites[0].y;
    min_x_ = sites[0].x;
    min_y_ = sites[0].y;
    for (const Point& s : sites) {
        min_x_ = std::min(min_x_, s.x);
        min_y_ = std::min(min_y_, s.y);
        max_x = std::max(max_x, s.x);
        max_y = std::max(max_y, s.y);
    }
    const double width = std::max(max_x - min_x_, 1e-300);
    const double height = std::max(max_y - min_y_, 1e-300);
    const double n = static_cast<double>(sites.size());
    cell_ = std::sqrt(width * height / n);
    if (!(cell_ > 0.0) || !std::isfinite(cell_)) cell_ = std::max(width, height);
    nx_ = static_cast<int>(std::clamp(std::ceil(width / cell_), 1.0, 4096.0));
    ny_ = static_cast<int>(std::clamp(std::ceil(height / cell_), 1.0, 4096.0));
    cell_ = std::max(width / nx_, height / ny_);

    const std::size_t cells = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    std::vector<std::uint32_t> counts(cells + 1, 0);
    std::vector<std::uint32_t> cell_of(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const int cx = std::clamp(static_cast<int>((sites[i].x - min_x_) / cell_), 0, nx_ - 1);
        const int cy = std::clamp(static_cast<int>((sites[i].y - min_y_) / cell_), 0, ny_ - 1);
        cell_of[i] = static_cast<std::uint32_t>(cy * nx_ + cx);
        ++counts[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) counts[c + 1] += counts[c];
    cell_start_ = counts;
    cell_sites_.resize(sites.size());
    std::vector<std::uint32_t> fill(counts.begin(), counts.end() - 1);
    // Sites enter their bucket in index order, which the tie rule relies on only
    // through the explicit (distance, index) comparison below.
    for (std::size_t i = 0; i < sites.size(); ++i) cell_sites_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
    cell_points_.resize(sites.size());
    for (std::size_t k = 0; k < sites.size(); ++k) cell_points_[k] = sites[cell_sites_[k]];
}

std::pair<std::size_t, double> NearestSiteIndex::nearest(Point p) const
{
    const double fx = (p.x - min_x_) / cell_;
    const double fy = (p.y - min_y_) / cell_;
    const int cx = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 1);
    std::size_t best = sites_.size();
    double best_d2 = std::numeric_limits<double>::infinity();

    auto scan_row = [&](int iy, int ix_lo, int ix_hi) {
        if (iy < 0 || iy >= ny_) return;
        ix_lo = std::max(ix_lo, 0);
        ix_hi = std::min(ix_hi, nx_ - 1);
        if (ix_lo > ix_hi) return;
        const std::size_t row = static_cast<std::size_t>(iy) * nx_;
        for (std::uint32_t k = cell_start_[row + ix_lo]; k < cell_start_[row + ix_hi + 1]; ++k) {
            const double d2 = squared_distance(p, cell_points_[k]);
            if (d2 > best_d2) continue;
            const std::uint32_t s = cell_sites_[k];
            if (d2 < best_d2 || s < best) {
                best_d2 = d2;
                best = s;
            }
        }
    };

    const int max_ring = std::max(nx_, ny_);
    for (int ring = 1; ring <= max_ring; ++ring) {
        if (ring == 1) {
            for (int iy = cy - 1; iy <= cy + 1; ++iy) scan_row(iy, cx - 1, cx + 1);
        } else {
            scan_row(cy - ring, cx - ring, cx + ring);
            scan_row(cy + ring, cx - ring, cx + ring);
            for (int iy = cy - ring + 1; iy <= cy + ring - 1; ++iy) {
                scan_row(iy, cx - ring, cx - ring);
                scan_row(iy, cx + ring, cx + ring);
            }
        }
        if (best == sites_.size()) continue;
        // Unscanned sites lie outside the square of cells within `ring` of
        // (cx, cy); the query's distance to that square's edge bounds them.
        const double gap = std::min({fx - (cx - ring), (cx + ring + 1) - fx, fy - (cy - ring), (cy + ring + 1) - fy});
        const double bound = std::max(gap, 0.0) * cell_;
        if (best_d2 < bound * bound) break;
    }
    return {best, best_d2};
}

Assignment voronoi_assign(std::span<const Point> points, std::span<const Point> sites)
{
    const NearestSiteIndex index(sites);
    Assignment out;
    out.site_index.resize(points.size());
    out.distance.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [site, d2] = index.nearest(points[i]);
        out.site_index[i] = site;
        out.distance[i] = std::sqrt(d2);
    }
    return out;
}

}  // namespace sgcov
