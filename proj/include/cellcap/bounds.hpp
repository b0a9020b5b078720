#pragma once

#include "cellcap/config.hpp"
#include "cellcap/geometry.hpp"
#include "cellcap/strategies.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cellcap::bounds {

struct BoundParams {
    double lambda = 1.0;
    double alpha = 3.0;
    double beta = 1.0;
    double gamma = 1.0;
    double noise = 1.0;
    double avg_power = 1.0; // M
    double tau = 1.0;
    double epsilon = 0.5;
    double eta = 0.5;
    double delta = 0.0;

    static BoundParams from_config(const NetworkConfig& cfg);

    double kappa() const noexcept { return beta * gamma * (1.0 - epsilon); }
    double c2() const noexcept;
    double c8() const noexcept;
};

enum class BoundKind { lb_lowdensity, lb_highdensity, lb_csir, ub_powercontrol, lb_coordination };

/// Canonical column order.
inline constexpr BoundKind all_bound_kinds[] = {BoundKind::lb_lowdensity, BoundKind::lb_highdensity,
                                                BoundKind::lb_csir, BoundKind::ub_powercontrol,
                                                BoundKind::lb_coordination};

std::string_view to_string(BoundKind kind);
/// Throws config_error("bounds", ...) for unknown names.
BoundKind parse_bound_kind(std::string_view name);

/// How the interference factor of the power-control upper bound is formed.
enum class InterferenceFactorForm {
    corrected,  // exponent 4 pi lambda kappa / (1-kappa)^2, tail term kept on [0,1]
    as_printed, // exponent 2 lambda kappa / (1-kappa)^2, tail term dropped on [0,1]
};

/// Noise-limited bound under the optimal threshold policy with noise folded
/// into the threshold. Scales like (pi lambda)^(-alpha/2) up to a log factor.
double lb_lowdensity(const BoundParams& p);

/// exp(delta) exp(pi lambda c2) (1 - exp(-pi lambda (c2 + 1))) / (1 + c2).
double lb_highdensity(const BoundParams& p);

/// exp(pi lambda c8) (1 - exp(-pi lambda (c8 + 1))) / (M (1 + c8)).
double lb_csir(const BoundParams& p);

/// (c/M)^2 (1 + Gamma(alpha+1) / (pi lambda)^alpha).
double pc_inverse_moment_factor(const BoundParams& p);

/// Split-integral interference factor of the power-control upper bound.
double pc_interference_factor(const BoundParams& p,
                              InterferenceFactorForm form = InterferenceFactorForm::corrected);

/// exp(beta N / c) sqrt(inverse moment factor * interference factor).
double ub_powercontrol(const BoundParams& p,
                       InterferenceFactorForm form = InterferenceFactorForm::corrected);

/// Integral over x <= 1 of exp(delta) exp(pi lambda c2 (1 - x^2)) f_{d_k}(x).
/// k = 1 is the uncoordinated case; silencing K neighbours uses k = K + 1.
double lb_coordination(const BoundParams& p, int k);

struct BoundCurve {
    BoundKind kind = BoundKind::lb_highdensity;
    std::vector<double> grid;
    std::vector<double> values;
    BoundParams params;
    double quadrature_tol = 1e-8;
    int k = 1;
};

/// Evaluates one bound over a strictly increasing grid of densities.
BoundCurve evaluate_curve(BoundKind kind, const BoundParams& params, std::vector<double> grid,
                          int k = 1,
                          InterferenceFactorForm form = InterferenceFactorForm::corrected);

struct LaplaceCheck {
    double analytic = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
};

/// E{exp(-a gamma I)} at the typical MU for a fixed deployment: the product
/// over interferers of their per-BS Laplace factors against a Monte Carlo
/// average over `n_slots` independent slots. Every active non-serving BS
/// runs `s`; interferer fading is EXP(1).
LaplaceCheck laplace_product_check(const geometry::NetworkRealization& real,
                                   const strategies::Strategy& s, const NetworkConfig& cfg,
                                   double a, std::size_t n_slots, std::uint64_t seed);

} // namespace cellcap::bounds
