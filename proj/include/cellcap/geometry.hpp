#pragma once

#include "cellcap/config.hpp"
#include "cellcap/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cellcap::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(Point p) noexcept
{
    return std::hypot(p.x, p.y);
}

/// One sampled deployment on the disc window.
///
/// BS indices are positions in `bs_points`. MU indices are positions in
/// `mu_points`; the typical MU at the origin is not stored there, its
/// serving BS is `serving`. Per-BS MU distances are kept in CSR form
/// (`cell_offsets`, `cell_mu_dist`) because the slot loop only needs the
/// distance from a BS to whichever MU it serves.
struct NetworkRealization {
    std::vector<Point> bs_points;
    std::vector<Point> mu_points;
    std::vector<std::size_t> association;   // MU index -> BS index

    std::vector<double> bs_dist;             // |z| for every BS
    std::vector<std::size_t> bs_order;       // BS indices by (|z|, index)
    std::vector<double> typical_dk;          // sorted |z|; typical_dk[0] = d0
    std::size_t serving = 0;
    double typical_d0 = 0.0;
    std::size_t n0 = 1;                      // MUs in the typical cell, incl. typical MU

    std::vector<std::size_t> cell_offsets;   // size bs_count()+1
    std::vector<double> cell_mu_dist;        // distances of each cell's MUs to its BS
    std::vector<bool> active;                // BS has at least one MU

    double window_radius = 0.0;
    int resamples = 0;                       // empty windows redrawn

    std::size_t bs_count() const noexcept { return bs_points.size(); }
    std::size_t cell_size(std::size_t bs) const { return cell_offsets[bs + 1] - cell_offsets[bs]; }
    std::span<const double> cell_distances(std::size_t bs) const
    {
        return {cell_mu_dist.data() + cell_offsets[bs], cell_size(bs)};
    }
    /// Distance from the origin to the k-th nearest BS (k >= 1).
    double dk(std::size_t k) const { return typical_dk.at(k - 1); }
};

/// Draws a Poisson deployment of basestations and users on the window
/// disc, inserts the typical MU at the origin and performs nearest-BS
/// association. Deterministic in (cfg, seed, index).
NetworkRealization sample_realization(const NetworkConfig& cfg, std::uint64_t seed,
                                      std::uint64_t index = 0);

/// Builds a realization from explicit coordinates; used for hand-built
/// scenarios (single BS at a fixed distance, prior-work replication, tests).
NetworkRealization build_realization(std::vector<Point> bs_points, std::vector<Point> mu_points,
                                     double window_radius);

/// P(d0 <= y) = 1 - exp(-lambda pi y^2).
double nearest_dist_cdf(double lambda, double y);

/// Density of the k-th nearest BS distance,
/// 2 (lambda pi)^k y^(2k-1) exp(-lambda pi y^2) / (k-1)!.
double kth_nearest_pdf(double lambda, int k, double y);

/// Closed-form CDF of the k-th nearest distance (regularised lower
/// incomplete gamma P(k, lambda pi y^2), void term included).
double kth_nearest_cdf(double lambda, int k, double y);

/// The k BSs nearest the origin, by distance then index.
std::vector<std::size_t> voronoi_neighbors(const NetworkRealization& real, std::size_t k);

} // namespace cellcap::geometry
