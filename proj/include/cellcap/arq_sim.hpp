#pragma once

#include "cellcap/config.hpp"
#include "cellcap/geometry.hpp"
#include "cellcap/strategies.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace cellcap::arq {

struct SimScenario {
    NetworkConfig cfg;
    strategies::Strategy strategy;
    std::size_t coordination_k = 0; // nearest non-serving BSs silenced
    bool enhanced_mode = false;     // unit typical path gain, no noise; interferers keep their real profiles
    std::uint64_t max_slots = 10000;
    std::size_t n_realizations = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const;
};

/// Outcome of one realization.
struct DelaySample {
    std::uint64_t delay = 0; // first successful slot, or max_slots when censored
    bool censored = false;
    std::size_t n0 = 1;
    double eta = 0.0;        // mean transmit probability over active interferers
};

/// Aggregate over realizations. Uncensored delays are kept sorted so the
/// survival curve can be read at any t without a dense table.
class DelayStats {
public:
    DelayStats() = default;

    /// Builds the aggregate from per-realization samples, in index order.
    static DelayStats from_samples(const std::vector<DelaySample>& samples,
                                   std::uint64_t max_slots, double bs_density);

    std::size_t n() const noexcept { return n_; }
    std::size_t censored_count() const noexcept { return censored_; }
    std::uint64_t max_slots() const noexcept { return max_slots_; }
    double bs_density() const noexcept { return lambda_; }
    const std::vector<std::uint64_t>& delays() const noexcept { return delays_; }

    /// Fraction of realizations with D > t.
    double survival(std::uint64_t t) const;
    /// survival(t) for t = 0..max_slots.
    std::vector<double> survival_curve(std::uint64_t t_end) const;

    /// Mean of min(D, T_max).
    double mean_censored() const noexcept { return mean_; }
    /// Mean of min(D, R) for R <= T_max.
    double mean_truncated(std::uint64_t r) const;
    double sd_censored() const noexcept { return sd_; }
    /// 95% normal half-width of mean_censored.
    double ci_halfwidth() const noexcept;

    double mean_n0() const noexcept { return mean_n0_; }
    double eta_measured() const noexcept { return eta_; }

    double capacity_per_bs() const noexcept { return 1.0 / mean_; }
    double capacity_network() const noexcept { return lambda_ / mean_; }
    double capacity_per_mu() const noexcept { return 1.0 / (mean_n0_ * mean_); }

private:
    std::vector<std::uint64_t> delays_;
    std::size_t n_ = 0;
    std::size_t censored_ = 0;
    std::uint64_t max_slots_ = 0;
    double lambda_ = 0.0;
    double mean_ = 0.0;
    double sd_ = 0.0;
    double mean_n0_ = 0.0;
    double eta_ = 0.0;
};

/// lambda (1 - S(R)) / E[min(D, R)]. Throws request_error when R > T_max or R = 0.
double finite_r_capacity(const DelayStats& stats, std::uint64_t r, double lambda);

/// Supplies the deployment for realization `index`.
using RealizationProvider = std::function<geometry::NetworkRealization(std::uint64_t index)>;

/// Samples per-realization outcomes. Each realization draws geometry and
/// slots from its own streams, so the result does not depend on `threads`.
std::vector<DelaySample> simulate_samples(const SimScenario& s);
std::vector<DelaySample> simulate_samples(const SimScenario& s, const RealizationProvider& provider);

DelayStats simulate_delay(const SimScenario& s);
DelayStats simulate_delay(const SimScenario& s, const RealizationProvider& provider);

/// Restriction-1 network: unit path gain on the typical link, no noise, and
/// interferer decisions that see only their own fading.
DelayStats simulate_enhanced_lb_network(const SimScenario& s);

/// Beamforming gain chisq(2 N_ant) on the serving link only.
DelayStats simulate_multiantenna(const SimScenario& s, int n_ant);

/// Delay of one realization with an explicit slot stream. Exposed for tests.
DelaySample simulate_realization(const SimScenario& s, const geometry::NetworkRealization& real,
                                 Rng& slots);

} // namespace cellcap::arq
