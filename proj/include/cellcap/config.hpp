#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cellcap {

/// Raised when a parameter violates a model invariant. `key()` names the
/// offending configuration key so the CLI can report it verbatim.
class config_error : public std::invalid_argument {
public:
    config_error(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A request that is well-formed but cannot be served by the given data
/// (e.g. more neighbours than basestations, an anchor off the grid).
class request_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical parameters of one network instance.
///
/// Densities are per square metre. The typical mobile user sits at the
/// origin of a disc window whose radius is chosen so that the expected
/// basestation count equals `window_mean_points`.
struct NetworkConfig {
    double bs_density = 1.0;          // lambda
    double mu_density = 10.0;         // mu
    double pathloss_exp = 3.0;        // alpha, must exceed 2
    double sinr_threshold = 1.0;      // beta
    double proc_gain = 1.0;           // gamma in (0, 1]
    double noise = 1.0;               // N >= 0
    double avg_power = 1.0;           // M > 0
    int antennas = 1;                 // beamforming antennas at each BS
    double window_mean_points = 200.0;

    /// Throws config_error naming the first violated invariant.
    void validate() const;

    /// Radius of the simulation disc, sqrt(mean / (lambda * pi)).
    double window_radius() const;
};

} // namespace cellcap
