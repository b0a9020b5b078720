#pragma once

#include "cellcap/channel.hpp"
#include "cellcap/config.hpp"
#include "cellcap/geometry.hpp"
#include "cellcap/rng.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cellcap::strategies {

/// Fixed (p, P) in every slot, regardless of distance.
struct PureAloha {
    double p = 0.5;
    double power = 1.0;
};

/// P(d) = power0 * l(d)^-rho, p(d) = min(p0, M / P(d)).
struct DistanceAloha {
    double p0 = 1.0;
    double power0 = 1.0;
    double rho = 1.0;
};

/// P = c / l(d) with c = M / (1 - epsilon), transmit with probability M / P.
struct PowerControl {
    double epsilon = 0.5;
};

/// Transmit iff the fading gain reaches delta, with channel-inverting power.
/// Without a fixed delta the cutoff is solved per link from the power budget.
struct CsitThreshold {
    std::optional<double> delta;
};

using Rule = std::variant<PureAloha, DistanceAloha, PowerControl, CsitThreshold>;

struct Strategy {
    Rule rule = PowerControl{};
    double avg_power = 1.0; // M
    double tau = 1.0;       // p P lies in [M / tau, M]

    std::string name() const;
    bool is_threshold() const noexcept { return std::holds_alternative<CsitThreshold>(rule); }

    /// Checks parameter ranges and the p P <= M budget; throws config_error.
    void validate(const NetworkConfig& cfg) const;
};

/// Received power the threshold policy aims for at its own MU, beta (gamma + N).
double csit_target(const NetworkConfig& cfg);

struct ThresholdSolution {
    double delta = 0.0;
    bool case1 = false; // budget covers every fading state, delta = 0
};

/// Cutoff delta such that the mean power spent, integral over h >= delta of
/// target / (l h) f(h) dh, equals M.
ThresholdSolution solve_threshold_for_target(double avg_power, double target, double path_gain,
                                             const channel::FadingModel& fading);

/// solve_threshold_for_target with target = gamma beta.
ThresholdSolution solve_threshold(double avg_power, double beta, double gamma, double path_gain,
                                  const channel::FadingModel& fading);

/// Mean power of the threshold policy, by quadrature. Used as a residual check.
double threshold_power(double delta, double target, double path_gain,
                       const channel::FadingModel& fading);

/// P(h >= delta).
double success_prob_threshold(double delta, const channel::FadingModel& fading);

/// Per-link rule resolved for one BS-MU distance.
struct LinkPolicy {
    enum class Kind { bernoulli, threshold };
    Kind kind = Kind::bernoulli;
    double p = 0.0;     // transmit probability (threshold: P(h >= delta))
    double power = 0.0; // bernoulli power
    double delta = 0.0; // threshold cutoff
    double coef = 0.0;  // threshold power is coef / h

    bool operator==(const LinkPolicy&) const = default;
};

/// Resolves the strategy for a link with path gain `path_gain` whose fading
/// follows `fading`.
LinkPolicy link_policy(const Strategy& s, const NetworkConfig& cfg, double path_gain,
                       const channel::FadingModel& fading);

/// Mean transmitted power p P (threshold: by quadrature).
double mean_power(const LinkPolicy& pol, const channel::FadingModel& fading);

/// Decision for a BS serving an MU at distance d. `h` is the BS's fading
/// gain towards that MU; it is required by csit_threshold and ignored by
/// the others. Throws std::invalid_argument when a required gain is absent.
channel::TxDecision decide(const Strategy& s, const NetworkConfig& cfg, double d,
                           std::optional<double> h, Rng& rng);

/// Same, for an already resolved policy.
channel::TxDecision decide(const LinkPolicy& pol, std::optional<double> h, Rng& rng);

/// Index (into the cell's MU list) of the MU a BS serves this slot.
std::size_t draw_served_mu(const geometry::NetworkRealization& real, std::size_t bs, Rng& rng);

/// For every active non-serving BS, the distance to the MU it serves in this
/// slot, chosen uniformly among its own MUs. Serving and inactive BSs map
/// to nullopt.
std::vector<std::optional<double>> interferer_assignment(const geometry::NetworkRealization& real,
                                                         Rng& rng);

} // namespace cellcap::strategies
