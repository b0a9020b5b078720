#pragma once

#include "cellcap/config.hpp"
#include "cellcap/geometry.hpp"
#include "cellcap/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace cellcap::channel {

enum class FadingKind {
    exp_unit,          // |h|^2 ~ EXP(1)
    stronger_scalar,   // pdf x exp(-x), dominates exp_unit
    chisq_2N,          // beamforming gain, Gamma(N, 1), mean N
    stronger_vector_N, // pdf proportional to x exp(-x/N), i.e. Gamma(2, N)
};

struct FadingModel {
    FadingKind kind = FadingKind::exp_unit;
    int n_ant = 1;

    static FadingModel exp_unit() { return {FadingKind::exp_unit, 1}; }
    static FadingModel stronger_scalar() { return {FadingKind::stronger_scalar, 1}; }
    static FadingModel chisq(int n) { return {FadingKind::chisq_2N, n}; }
    static FadingModel stronger_vector(int n) { return {FadingKind::stronger_vector_N, n}; }

    double mean() const;
    double pdf(double x) const;
    /// P(h >= x).
    double survival(double x) const;
    /// Shape/scale of the equivalent gamma law.
    double gamma_shape() const;
    double gamma_scale() const;
};

/// Path gain min{1, d^-alpha}, or d^-alpha when `amplifying`.
struct PathGain {
    double gain = 0.0;
    bool capped = false; // amplifying model evaluated at d = 0
};

PathGain pathloss_checked(double d, double alpha, bool amplifying = false);

inline double pathloss(double d, double alpha, bool amplifying = false)
{
    return pathloss_checked(d, alpha, amplifying).gain;
}

/// One i.i.d. draw from the fading law.
double draw_fading(const FadingModel& model, Rng& rng);

struct TxDecision {
    bool transmit = false;
    double power = 0.0;
};

struct SlotOutcome {
    double signal_power = 0.0;
    double interference = 0.0; // sum of P h l over contributing BSs, before gamma
    double sinr = 0.0;
    bool success = false;
    bool transmitted = false;
};

/// SINR at the typical MU for one slot.
///
/// `decisions` and `fading` are indexed by BS. `silenced` lists BSs whose
/// transmissions are suppressed at the typical MU; the serving BS is never
/// silenced. Inactive BSs never contribute.
SlotOutcome compute_sinr(const geometry::NetworkRealization& real,
                         std::span<const TxDecision> decisions, std::span<const double> fading,
                         const NetworkConfig& cfg, std::span<const std::size_t> silenced = {},
                         bool amplifying = false);

struct ConnectionEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Single-slot P(SINR > beta) with every BS transmitting at unit power.
/// Used to replicate the prior-work density-invariance claim for the
/// amplifying path-loss model.
ConnectionEstimate one_shot_connection_prob(const NetworkConfig& cfg, bool amplifying,
                                            std::size_t n_real, std::uint64_t seed);

} // namespace cellcap::channel
