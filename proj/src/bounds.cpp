#include "cellcap/bounds.hpp"

#include "cellcap/channel.hpp"
#include "cellcap/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace cellcap::bounds {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double tail_exponent = 60.0; // truncate where exp(-lambda pi y^2) < e^-60

double nearest_pdf(double lambda, double y)
{
    return 2.0 * pi * lambda * y * std::exp(-pi * lambda * y * y);
}

double tail_radius(double lambda)
{
    return std::sqrt(tail_exponent / (pi * lambda));
}

void check_lambda(const BoundParams& p)
{
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        throw config_error("bs_density", "must be positive");
    if (!(p.alpha > 2.0))
        throw config_error("pathloss_exp", "pathloss_exp must exceed 2");
}

void check_c2(const BoundParams& p)
{
    const double x = p.eta * std::exp(-p.tau / p.avg_power);
    if (!(x > 0.0 && x < 1.0))
        throw config_error("bound_eta", "c2 requires 0 < eta exp(-tau/M) < 1");
}

/// Integral over [a, b] split at 1, where the path gain switches regime.
double integrate_split(const std::function<double(double)>& f, double a, double b)
{
    if (b <= a)
        return 0.0;
    if (a < 1.0 && b > 1.0)
        return quad::integral(f, a, 1.0) + quad::integral(f, 1.0, b);
    return quad::integral(f, a, b);
}

} // namespace

BoundParams BoundParams::from_config(const NetworkConfig& cfg)
{
    BoundParams p;
    p.lambda = cfg.bs_density;
    p.alpha = cfg.pathloss_exp;
    p.beta = cfg.sinr_threshold;
    p.gamma = cfg.proc_gain;
    p.noise = cfg.noise;
    p.avg_power = cfg.avg_power;
    return p;
}

double BoundParams::c2() const noexcept
{
    const double x = eta * std::exp(-tau / avg_power);
    return x / (1.0 - x);
}

double BoundParams::c8() const noexcept
{
    const double mgb = avg_power * gamma * beta;
    return (1.0 + mgb) / (1.0 + mgb - eta * (avg_power / tau) * gamma * beta) - 1.0;
}

std::string_view to_string(BoundKind kind)
{
    switch (kind) {
    case BoundKind::lb_lowdensity:
        return "lb_lowdensity";
    case BoundKind::lb_highdensity:
        return "lb_highdensity";
    case BoundKind::lb_csir:
        return "lb_csir";
    case BoundKind::ub_powercontrol:
        return "ub_powercontrol";
    case BoundKind::lb_coordination:
        return "lb_coordination";
    }
    return "unknown";
}

BoundKind parse_bound_kind(std::string_view name)
{
    for (BoundKind k : all_bound_kinds)
        if (to_string(k) == name)
            return k;
    throw config_error("bounds", "unknown bound '" + std::string(name) + "'");
}

double lb_lowdensity(const BoundParams& p)
{
    check_lambda(p);
    const double beta_eff = p.beta * p.noise;
    if (!(beta_eff > 0.0))
        return 1.0;
    const double ratio = beta_eff / p.avg_power;
    // Below y1 the budget covers every fading state and D = 1.
    const double y1 = ratio > 1.0 ? 0.0 : std::pow(1.0 / ratio, 1.0 / p.alpha);
    const double case1 = -std::expm1(-pi * p.lambda * y1 * y1);
    const double y_max = tail_radius(p.lambda);
    auto integrand = [&](double y) {
        const double l = channel::pathloss(y, p.alpha);
        return (1.0 / l) / (1.0 - std::log(p.avg_power * l / beta_eff)) * nearest_pdf(p.lambda, y);
    };
    return case1 + ratio * integrate_split(integrand, y1, y_max);
}

double lb_highdensity(const BoundParams& p)
{
    check_lambda(p);
    check_c2(p);
    const double c2 = p.c2();
    const double pl = pi * p.lambda;
    return std::exp(p.delta + pl * c2) / (1.0 + c2) * -std::expm1(-pl * (c2 + 1.0));
}

double lb_csir(const BoundParams& p)
{
    check_lambda(p);
    const double mgb = p.avg_power * p.gamma * p.beta;
    if (!(1.0 + mgb - p.eta * (p.avg_power / p.tau) * p.gamma * p.beta > 0.0))
        throw config_error("bound_eta", "c8 requires eta (M/tau) gamma beta < 1 + M gamma beta");
    const double c8 = p.c8();
    const double pl = pi * p.lambda;
    return std::exp(pl * c8) / p.avg_power / (1.0 + c8) * -std::expm1(-pl * (c8 + 1.0));
}

double pc_inverse_moment_factor(const BoundParams& p)
{
    check_lambda(p);
    const double c = p.avg_power / (1.0 - p.epsilon);
    const double cm = c / p.avg_power;
    return cm * cm * (1.0 + std::tgamma(p.alpha + 1.0) / std::pow(pi * p.lambda, p.alpha));
}

double pc_interference_factor(const BoundParams& p, InterferenceFactorForm form)
{
    check_lambda(p);
    const double kappa = p.kappa();
    if (!(kappa < 1.0))
        throw config_error("epsilon", "power control requires sinr_threshold * proc_gain * (1 - epsilon) < 1");
    const double s = (1.0 - kappa) * (1.0 - kappa);
    const bool corrected = form == InterferenceFactorForm::corrected;
    const double a = corrected ? 4.0 * pi * p.lambda * kappa / s : 2.0 * p.lambda * kappa / s;
    const double tail = corrected ? 1.0 / (p.alpha - 2.0) : 0.0;
    auto inner = [&](double x) {
        return std::exp(a * ((1.0 - x * x) / 2.0 + tail)) * nearest_pdf(p.lambda, x);
    };
    auto outer = [&](double x) {
        return std::exp(a * std::pow(x, 2.0 - p.alpha) / (p.alpha - 2.0)) * nearest_pdf(p.lambda, x);
    };
    const double y_max = std::max(1.0, tail_radius(p.lambda));
    return quad::integral(inner, 0.0, 1.0) + quad::integral(outer, 1.0, y_max);
}

double ub_powercontrol(const BoundParams& p, InterferenceFactorForm form)
{
    const double c = p.avg_power / (1.0 - p.epsilon);
    return std::exp(p.beta * p.noise / c) *
           std::sqrt(pc_inverse_moment_factor(p) * pc_interference_factor(p, form));
}

double lb_coordination(const BoundParams& p, int k)
{
    if (k < 1)
        throw std::domain_error("lb_coordination: k must be at least 1");
    check_lambda(p);
    check_c2(p);
    const double c2 = p.c2();
    auto f = [&](double x) {
        return std::exp(p.delta + pi * p.lambda * c2 * (1.0 - x * x)) *
               geometry::kth_nearest_pdf(p.lambda, k, x);
    };
    return quad::integral(f, 0.0, 1.0);
}

BoundCurve evaluate_curve(BoundKind kind, const BoundParams& params, std::vector<double> grid, int k,
                          InterferenceFactorForm form)
{
    if (grid.empty())
        throw config_error("lambda_grid", "must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw config_error("lambda_grid", "must be strictly increasing");
    BoundCurve curve;
    curve.kind = kind;
    curve.params = params;
    curve.k = k;
    curve.quadrature_tol = quad::default_rel_tol;
    curve.values.reserve(grid.size());
    for (double lambda : grid) {
        BoundParams p = params;
        p.lambda = lambda;
        switch (kind) {
        case BoundKind::lb_lowdensity:
            curve.values.push_back(lb_lowdensity(p));
            break;
        case BoundKind::lb_highdensity:
            curve.values.push_back(lb_highdensity(p));
            break;
        case BoundKind::lb_csir:
            curve.values.push_back(lb_csir(p));
            break;
        case BoundKind::ub_powercontrol:
            curve.values.push_back(ub_powercontrol(p, form));
            break;
        case BoundKind::lb_coordination:
            curve.values.push_back(lb_coordination(p, k));
            break;
        }
    }
    curve.grid = std::move(grid);
    return curve;
}

LaplaceCheck laplace_product_check(const geometry::NetworkRealization& real,
                                   const strategies::Strategy& s, const NetworkConfig& cfg, double a,
                                   std::size_t n_slots, std::uint64_t seed)
{
    using strategies::LinkPolicy;
    if (n_slots < 2)
        throw std::invalid_argument("laplace_product_check: need at least two slots");
    const auto expo_law = channel::FadingModel::exp_unit();
    const double ag = a * cfg.proc_gain;

    struct Cell {
        double gain;
        std::vector<LinkPolicy> policies;
    };
    std::vector<Cell> cells;
    for (std::size_t b = 0; b < real.bs_count(); ++b) {
        if (b == real.serving || !real.active[b])
            continue;
        Cell c{channel::pathloss(real.bs_dist[b], cfg.pathloss_exp), {}};
        for (double d : real.cell_distances(b))
            c.policies.push_back(
                strategies::link_policy(s, cfg, channel::pathloss(d, cfg.pathloss_exp), expo_law));
        cells.push_back(std::move(c));
    }

    double log_analytic = 0.0;
    for (const auto& c : cells) {
        double factor = 0.0;
        for (const auto& pol : c.policies) {
            if (pol.kind == LinkPolicy::Kind::bernoulli) {
                factor += (1.0 - pol.p) + pol.p / (1.0 + ag * c.gain * pol.power);
            } else {
                const double sc = ag * c.gain * pol.coef;
                auto f = [&](double g) { return std::exp(-g) * g / (g + sc); };
                factor += -std::expm1(-pol.delta) + quad::integral(f, pol.delta, pol.delta + 80.0);
            }
        }
        log_analytic += std::log(factor / double(c.policies.size()));
    }

    Rng rng = make_stream(seed, 0, Stream::auxiliary);
    std::exponential_distribution<double> expo(1.0);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < n_slots; ++t) {
        double interference = 0.0;
        for (const auto& c : cells) {
            const std::size_t u =
                c.policies.size() == 1
                    ? 0
                    : std::uniform_int_distribution<std::size_t>(0, c.policies.size() - 1)(rng);
            const auto& pol = c.policies[u];
            std::optional<double> g;
            if (pol.kind == LinkPolicy::Kind::threshold)
                g = expo(rng);
            const auto tx = strategies::decide(pol, g, rng);
            if (tx.transmit)
                interference += tx.power * expo(rng) * c.gain;
        }
        const double v = std::exp(-ag * interference);
        sum += v;
        sum_sq += v * v;
    }
    const double n = double(n_slots);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {std::exp(log_analytic), mean, std::sqrt(var / n)};
}

} // namespace cellcap::bounds
