#include "cellcap/config.hpp"

#include <cmath>
#include <numbers>

namespace cellcap {

void NetworkConfig::validate() const
{
    if (!(bs_density > 0.0) || !std::isfinite(bs_density))
        throw config_error("bs_density", "must be positive");
    if (!(mu_density >= 0.0) || !std::isfinite(mu_density))
        throw config_error("mu_density", "must be non-negative");
    if (!(pathloss_exp > 2.0) || !std::isfinite(pathloss_exp))
        throw config_error("pathloss_exp", "pathloss_exp must exceed 2");
    if (!(sinr_threshold > 0.0) || !std::isfinite(sinr_threshold))
        throw config_error("sinr_threshold", "must be positive");
    if (!(proc_gain > 0.0 && proc_gain <= 1.0))
        throw config_error("proc_gain", "must lie in (0, 1]");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw config_error("noise", "must be non-negative");
    if (!(avg_power > 0.0) || !std::isfinite(avg_power))
        throw config_error("avg_power", "must be positive");
    if (antennas < 1)
        throw config_error("antennas", "must be at least 1");
    if (!(window_mean_points >= 1.0) || !std::isfinite(window_mean_points))
        throw config_error("window_mean_points", "must be at least 1");
}

double NetworkConfig::window_radius() const
{
    if (!(bs_density > 0.0))
        throw config_error("bs_density", "must be positive");
    return std::sqrt(window_mean_points / (bs_density * std::numbers::pi));
}

} // namespace cellcap
