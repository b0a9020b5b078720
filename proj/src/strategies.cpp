#include "cellcap/strategies.hpp"

#include "cellcap/quadrature.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace cellcap::strategies {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double budget_slack = 1e-12;

/// Solves E1(delta) = r for delta > 0.
double solve_e1(double r)
{
    double hi = std::max(1.0, -std::log(r));
    double lo = hi;
    while (boost::math::expint(1, lo) < r) {
        lo *= 0.5;
        if (lo < 1e-300)
            return 0.0;
    }
    if (lo == hi)
        return hi;
    auto f = [r](double d) { return std::log(boost::math::expint(1, d)) - std::log(r); };
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (a + b);
}

} // namespace

std::string Strategy::name() const
{
    return std::visit(overloaded{[](const PureAloha&) { return std::string("pure_aloha"); },
                                 [](const DistanceAloha&) { return std::string("distance_aloha"); },
                                 [](const PowerControl&) { return std::string("power_control"); },
                                 [](const CsitThreshold&) { return std::string("csit_threshold"); }},
                      rule);
}

void Strategy::validate(const NetworkConfig& cfg) const
{
    if (!(avg_power > 0.0) || !std::isfinite(avg_power))
        throw config_error("avg_power", "must be positive");
    if (!(tau >= 1.0) || !std::isfinite(tau))
        throw config_error("tau", "must be at least 1");
    const double m = avg_power;
    std::visit(
        overloaded{
            [&](const PureAloha& a) {
                if (!(a.p > 0.0 && a.p <= 1.0))
                    throw config_error("aloha_p", "must lie in (0, 1]");
                if (!(a.power > 0.0) || !std::isfinite(a.power))
                    throw config_error("aloha_power", "must be positive");
                if (a.p * a.power > m * (1.0 + budget_slack))
                    throw config_error("aloha_power", "aloha_p * aloha_power exceeds avg_power");
            },
            [&](const DistanceAloha& a) {
                if (!(a.p0 > 0.0 && a.p0 <= 1.0))
                    throw config_error("distance_p0", "must lie in (0, 1]");
                if (!(a.power0 > 0.0) || !std::isfinite(a.power0))
                    throw config_error("distance_power0", "must be positive");
                if (!(a.rho >= 0.0) || !std::isfinite(a.rho))
                    throw config_error("distance_rho", "must be non-negative");
                if (a.p0 * a.power0 > m * (1.0 + budget_slack))
                    throw config_error("distance_power0", "distance_p0 * distance_power0 exceeds avg_power");
            },
            [&](const PowerControl& pc) {
                if (!(pc.epsilon >= 0.0 && pc.epsilon < 1.0))
                    throw config_error("epsilon", "must lie in [0, 1)");
                if (!(cfg.sinr_threshold * cfg.proc_gain * (1.0 - pc.epsilon) < 1.0))
                    throw config_error("epsilon",
                                       "power control requires sinr_threshold * proc_gain * (1 - epsilon) < 1");
            },
            [&](const CsitThreshold& c) {
                if (c.delta && !(*c.delta >= 0.0 && std::isfinite(*c.delta)))
                    throw config_error("csit_delta", "must be non-negative");
            }},
        rule);
}

double csit_target(const NetworkConfig& cfg)
{
    return cfg.sinr_threshold * (cfg.proc_gain + cfg.noise);
}

ThresholdSolution solve_threshold_for_target(double avg_power, double target, double path_gain,
                                             const channel::FadingModel& fading)
{
    if (!(avg_power > 0.0) || !(target > 0.0) || !(path_gain > 0.0))
        throw std::domain_error("solve_threshold: M, target and path gain must be positive");
    // Mean power is (target / l) G(delta) with G(delta) = E[1{h >= delta} / h].
    const double r = avg_power * path_gain / target;
    const double k = fading.gamma_shape();
    const double theta = fading.gamma_scale();
    if (k == 1.0)
        return {theta * solve_e1(r * theta), false};
    // G(delta) = Q(k - 1, delta / theta) / ((k - 1) theta).
    const double q = r * (k - 1.0) * theta;
    if (q >= 1.0)
        return {0.0, true};
    if (k == 2.0)
        return {-theta * std::log(q), false};
    return {theta * boost::math::gamma_q_inv(k - 1.0, q), false};
}

ThresholdSolution solve_threshold(double avg_power, double beta, double gamma, double path_gain,
                                  const channel::FadingModel& fading)
{
    return solve_threshold_for_target(avg_power, gamma * beta, path_gain, fading);
}

double threshold_power(double delta, double target, double path_gain,
                       const channel::FadingModel& fading)
{
    const double theta = fading.gamma_scale();
    const double k = fading.gamma_shape();
    auto integrand = [&](double x) { return x > 0.0 ? fading.pdf(x) / x : 0.0; };
    const double mid = delta + theta * std::max(1.0, k);
    const double hi = delta + theta * (k + 80.0);
    double g = quad::integral(integrand, delta, mid, 1e-14, 1e-11);
    g += quad::integral(integrand, mid, hi, 1e-14, 1e-11);
    return target / path_gain * g;
}

double success_prob_threshold(double delta, const channel::FadingModel& fading)
{
    if (!(delta >= 0.0))
        throw std::domain_error("success_prob_threshold: delta must be non-negative");
    return fading.survival(delta);
}

LinkPolicy link_policy(const Strategy& s, const NetworkConfig& cfg, double path_gain,
                       const channel::FadingModel& fading)
{
    const double m = s.avg_power;
    return std::visit(
        overloaded{[&](const PureAloha& a) {
                       return LinkPolicy{LinkPolicy::Kind::bernoulli, a.p, a.power, 0.0, 0.0};
                   },
                   [&](const DistanceAloha& a) {
                       const double power = a.power0 * std::pow(path_gain, -a.rho);
                       return LinkPolicy{LinkPolicy::Kind::bernoulli, std::min(a.p0, m / power), power,
                                         0.0, 0.0};
                   },
                   [&](const PowerControl& pc) {
                       const double c = m / (1.0 - pc.epsilon);
                       const double power = c / path_gain;
                       return LinkPolicy{LinkPolicy::Kind::bernoulli, m / power, power, 0.0, 0.0};
                   },
                   [&](const CsitThreshold& c) {
                       const double target = csit_target(cfg);
                       double delta = solve_threshold_for_target(m, target, path_gain, fading).delta;
                       if (c.delta)
                           delta = std::max(delta, *c.delta);
                       return LinkPolicy{LinkPolicy::Kind::threshold, fading.survival(delta), 0.0, delta,
                                         target / path_gain};
                   }},
        s.rule);
}

double mean_power(const LinkPolicy& pol, const channel::FadingModel& fading)
{
    if (pol.kind == LinkPolicy::Kind::bernoulli)
        return pol.p * pol.power;
    return threshold_power(pol.delta, pol.coef, 1.0, fading);
}

channel::TxDecision decide(const LinkPolicy& pol, std::optional<double> h, Rng& rng)
{
    if (pol.kind == LinkPolicy::Kind::bernoulli) {
        const bool tx = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < pol.p;
        return {tx, pol.power};
    }
    if (!h)
        throw std::invalid_argument("decide: csit_threshold needs the fading gain");
    if (*h >= pol.delta && *h > 0.0)
        return {true, pol.coef / *h};
    return {false, 0.0};
}

channel::TxDecision decide(const Strategy& s, const NetworkConfig& cfg, double d,
                           std::optional<double> h, Rng& rng)
{
    if (s.is_threshold() && !h)
        throw std::invalid_argument("decide: csit_threshold needs the fading gain");
    const auto pol = link_policy(s, cfg, channel::pathloss(d, cfg.pathloss_exp),
                                 channel::FadingModel::exp_unit());
    return decide(pol, h, rng);
}

std::size_t draw_served_mu(const geometry::NetworkRealization& real, std::size_t bs, Rng& rng)
{
    const std::size_t n = real.cell_size(bs);
    if (n == 0)
        throw request_error("draw_served_mu: the basestation has no users");
    if (n == 1)
        return 0;
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<std::optional<double>> interferer_assignment(const geometry::NetworkRealization& real,
                                                         Rng& rng)
{
    std::vector<std::optional<double>> out(real.bs_count());
    for (std::size_t b = 0; b < real.bs_count(); ++b) {
        if (b == real.serving || real.cell_size(b) == 0)
            continue;
        out[b] = real.cell_distances(b)[draw_served_mu(real, b, rng)];
    }
    return out;
}

} // namespace cellcap::strategies
