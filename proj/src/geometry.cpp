#include "cellcap/geometry.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cellcap::geometry {

namespace {

double dist2(Point a, Point b) noexcept
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::vector<Point> uniform_disc(std::size_t n, double r, Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        const double rad = r * std::sqrt(u(rng));
        const double th = 2.0 * std::numbers::pi * u(rng);
        p = {rad * std::cos(th), rad * std::sin(th)};
    }
    return pts;
}

/// Bucket grid over the window for nearest-BS queries.
class NearestIndex {
public:
    NearestIndex(const std::vector<Point>& pts, double r) : pts_(pts)
    {
        const double side = 2.0 * r;
        cells_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(pts.size()))));
        lo_ = -r;
        h_ = side / double(cells_);
        if (!(h_ > 0.0))
            h_ = 1.0;
        offsets_.assign(cells_ * cells_ + 1, 0);
        std::vector<std::size_t> cell_of(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cell_of[i] = cell_index(pts[i]);
            ++offsets_[cell_of[i] + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        items_.resize(pts.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i)
            items_[fill[cell_of[i]]++] = i;
    }

    /// Nearest point, ties to the lowest index.
    std::size_t nearest(Point q) const
    {
        const long cx = coord(q.x);
        const long cy = coord(q.y);
        std::size_t best = std::numeric_limits<std::size_t>::max();
        double best_d = std::numeric_limits<double>::infinity();
        const long n = static_cast<long>(cells_);
        for (long ring = 0;; ++ring) {
            for (long ix = cx - ring; ix <= cx + ring; ++ix) {
                for (long iy = cy - ring; iy <= cy + ring; ++iy) {
                    if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring)
                        continue;
                    if (ix < 0 || iy < 0 || ix >= n || iy >= n)
                        continue;
                    const std::size_t c = static_cast<std::size_t>(ix) * cells_ + static_cast<std::size_t>(iy);
                    for (std::size_t k = offsets_[c]; k < offsets_[c + 1]; ++k) {
                        const std::size_t i = items_[k];
                        const double d = dist2(q, pts_[i]);
                        if (d < best_d || (d == best_d && i < best)) {
                            best_d = d;
                            best = i;
                        }
                    }
                }
            }
            // Every point outside the scanned block is at least ring * h away.
            const double reach = double(ring) * h_;
            if (best != std::numeric_limits<std::size_t>::max() && reach * reach > best_d)
                break;
            if (ring > 2 * n + 2)
                break;
        }
        return best;
    }

private:
    long coord(double v) const
    {
        const long c = static_cast<long>(std::floor((v - lo_) / h_));
        return std::clamp<long>(c, 0, static_cast<long>(cells_) - 1);
    }
    std::size_t cell_index(Point p) const
    {
        return static_cast<std::size_t>(coord(p.x)) * cells_ + static_cast<std::size_t>(coord(p.y));
    }

    const std::vector<Point>& pts_;
    std::size_t cells_ = 1;
    double lo_ = 0.0;
    double h_ = 1.0;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> items_;
};

} // namespace

NetworkRealization build_realization(std::vector<Point> bs_points, std::vector<Point> mu_points,
                                     double window_radius)
{
    if (bs_points.empty())
        throw request_error("a realization needs at least one basestation");

    NetworkRealization real;
    real.bs_points = std::move(bs_points);
    real.mu_points = std::move(mu_points);
    real.window_radius = window_radius;

    const std::size_t nb = real.bs_points.size();
    std::vector<double> r2(nb);
    real.bs_dist.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        r2[i] = dist2(real.bs_points[i], {});
        real.bs_dist[i] = norm(real.bs_points[i]);
    }
    real.bs_order.resize(nb);
    std::iota(real.bs_order.begin(), real.bs_order.end(), std::size_t{0});
    std::sort(real.bs_order.begin(), real.bs_order.end(), [&](std::size_t a, std::size_t b) {
        return r2[a] < r2[b] || (r2[a] == r2[b] && a < b);
    });
    real.typical_dk.resize(nb);
    for (std::size_t k = 0; k < nb; ++k)
        real.typical_dk[k] = real.bs_dist[real.bs_order[k]];
    real.serving = real.bs_order.front();
    real.typical_d0 = real.typical_dk.front();

    double extent = window_radius;
    for (const auto& p : real.bs_points)
        extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    for (const auto& p : real.mu_points)
        extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    const NearestIndex index(real.bs_points, extent);

    const std::size_t nm = real.mu_points.size();
    real.association.resize(nm);
    real.cell_offsets.assign(nb + 1, 0);
    for (std::size_t m = 0; m < nm; ++m) {
        real.association[m] = index.nearest(real.mu_points[m]);
        ++real.cell_offsets[real.association[m] + 1];
    }
    std::partial_sum(real.cell_offsets.begin(), real.cell_offsets.end(), real.cell_offsets.begin());
    real.cell_mu_dist.resize(nm);
    std::vector<std::size_t> fill(real.cell_offsets.begin(), real.cell_offsets.end() - 1);
    for (std::size_t m = 0; m < nm; ++m) {
        const std::size_t b = real.association[m];
        const Point d{real.mu_points[m].x - real.bs_points[b].x,
                      real.mu_points[m].y - real.bs_points[b].y};
        real.cell_mu_dist[fill[b]++] = norm(d);
    }

    real.active.assign(nb, false);
    for (std::size_t b = 0; b < nb; ++b)
        real.active[b] = real.cell_size(b) > 0;
    real.active[real.serving] = true;
    real.n0 = 1 + real.cell_size(real.serving);
    return real;
}

NetworkRealization sample_realization(const NetworkConfig& cfg, std::uint64_t seed,
                                      std::uint64_t index)
{
    cfg.validate();
    const double r = cfg.window_radius();
    Rng rng = make_stream(seed, index, Stream::geometry);

    std::poisson_distribution<std::size_t> n_bs(cfg.window_mean_points);
    std::size_t nb = n_bs(rng);
    int resamples = 0;
    while (nb == 0) {
        ++resamples;
        nb = n_bs(rng);
    }
    auto bs = uniform_disc(nb, r, rng);

    const double mu_mean = cfg.mu_density * std::numbers::pi * r * r;
    std::size_t nm = 0;
    if (mu_mean > 0.0)
        nm = std::poisson_distribution<std::size_t>(mu_mean)(rng);
    auto mu = uniform_disc(nm, r, rng);

    auto real = build_realization(std::move(bs), std::move(mu), r);
    real.resamples = resamples;
    return real;
}

double nearest_dist_cdf(double lambda, double y)
{
    if (!(lambda > 0.0))
        throw std::domain_error("nearest_dist_cdf: lambda must be positive");
    if (!(y >= 0.0))
        throw std::domain_error("nearest_dist_cdf: y must be non-negative");
    return -std::expm1(-lambda * std::numbers::pi * y * y);
}

double kth_nearest_pdf(double lambda, int k, double y)
{
    if (k < 1)
        throw std::domain_error("kth_nearest_pdf: k must be at least 1");
    if (!(lambda > 0.0))
        throw std::domain_error("kth_nearest_pdf: lambda must be positive");
    if (!(y >= 0.0))
        throw std::domain_error("kth_nearest_pdf: y must be non-negative");
    if (y == 0.0)
        return 0.0;
    const double lp = lambda * std::numbers::pi;
    const double log_pdf = std::log(2.0) + k * std::log(lp) + (2.0 * k - 1.0) * std::log(y) - lp * y * y -
                           std::lgamma(double(k));
    return std::exp(log_pdf);
}

double kth_nearest_cdf(double lambda, int k, double y)
{
    if (k < 1)
        throw std::domain_error("kth_nearest_cdf: k must be at least 1");
    if (!(lambda > 0.0))
        throw std::domain_error("kth_nearest_cdf: lambda must be positive");
    if (!(y >= 0.0))
        throw std::domain_error("kth_nearest_cdf: y must be non-negative");
    return boost::math::gamma_p(double(k), lambda * std::numbers::pi * y * y);
}

std::vector<std::size_t> voronoi_neighbors(const NetworkRealization& real, std::size_t k)
{
    if (k > real.bs_count())
        throw request_error("voronoi_neighbors: k exceeds the basestation count");
    return {real.bs_order.begin(), real.bs_order.begin() + static_cast<std::ptrdiff_t>(k)};
}

} // namespace cellcap::geometry
