// Acceptance suite. Each criterion prints one PASS/FAIL line; the process
// exits non-zero when any selected criterion fails.

#include "cellcap/arq_sim.hpp"
#include "cellcap/bounds.hpp"
#include "cellcap/channel.hpp"
#include "cellcap/geometry.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace cellcap;

namespace {

constexpr double pi = std::numbers::pi;

// Pinned tolerances.
constexpr double ks_alpha = 0.01;
constexpr double chi_alpha = 0.01;
constexpr double sigma_slack = 3.0;
constexpr double divergence_growth = 0.20;
constexpr double lowdensity_slope_lo = -1.8;
constexpr double lowdensity_slope_hi = -1.2;
constexpr double highdensity_r2 = 0.95;
constexpr double censor_limit = 1e-3;
constexpr double slope_change_limit = 0.25;
constexpr double lowdensity_flatness = 0.15;
constexpr double highdensity_slope_rel = 0.01;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double void_cdf(double lambda, int k, double y)
{
    const double a = lambda * pi * y * y;
    double term = std::exp(-a), sum = 0.0;
    for (int i = 0; i < k; ++i) {
        sum += term;
        term *= a / double(i + 1);
    }
    return 1.0 - sum;
}

arq::SimScenario base_scenario(strategies::Rule rule, double lambda)
{
    arq::SimScenario s;
    s.cfg.bs_density = lambda;
    s.cfg.mu_density = 10.0 * lambda;
    s.strategy.rule = rule;
    return s;
}

double fitted_log_slope(const std::vector<double>& x, const std::vector<double>& means)
{
    std::vector<double> y;
    for (double m : means)
        y.push_back(std::log(m));
    return oracle::linear_fit(x, y).slope;
}

Outcome distance_laws()
{
    const double lambda = 1.0;
    NetworkConfig cfg;
    cfg.bs_density = lambda;
    cfg.mu_density = 0.0;
    std::vector<double> d0, d7;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const auto real = geometry::sample_realization(cfg, 101, i);
        d0.push_back(real.typical_d0);
        d7.push_back(real.dk(7));
    }
    const double p0 = oracle::ks_test(d0, [&](double y) { return void_cdf(lambda, 1, y); });
    const double p7 = oracle::ks_test(d7, [&](double y) { return void_cdf(lambda, 7, y); });
    return {p0 > ks_alpha && p7 > ks_alpha, fmt("KS p(d0)=%.4f p(d7)=%.4f, need > %.2f", p0, p7, ks_alpha)};
}

Outcome geometric_oracle()
{
    struct Triple {
        double p, power0, rho, d0;
    };
    const std::vector<Triple> triples = {{0.25, 4.0, 0.0, 1.0}, {0.5, 0.5, 1.0, 1.5}, {0.8, 1.2, 0.0, 0.7}};
    bool pass = true;
    std::ostringstream os;
    for (const auto& t : triples) {
        auto s = base_scenario(strategies::DistanceAloha{t.p, t.power0, t.rho}, 1.0);
        s.n_realizations = 20000;
        s.max_slots = 1000000;
        s.seed = 202;
        const double d0 = t.d0;
        const auto st = arq::simulate_delay(
            s, [d0](std::uint64_t) { return geometry::build_realization({{d0, 0.0}}, {}, 10.0); });
        const double l = channel::pathloss(d0, s.cfg.pathloss_exp);
        const double power = t.power0 * std::pow(l, -t.rho);
        const double q = t.p * std::exp(-s.cfg.sinr_threshold * s.cfg.noise / (l * power));
        const double z = std::abs(st.mean_censored() - 1.0 / q) / (st.sd_censored() / std::sqrt(double(st.n())));
        const auto chi = oracle::geometric_chi_square(st.delays(), q);
        pass = pass && z < sigma_slack && chi.p_value > chi_alpha && st.censored_count() == 0;
        os << fmt("[p=%g P=%g d0=%g: mean %.4f vs %.4f, %.2f sigma, chi2 p=%.3f] ", t.p, power, d0,
                  st.mean_censored(), 1.0 / q, z, chi.p_value);
    }
    return {pass, os.str()};
}

Outcome aloha_divergence()
{
    std::vector<double> means;
    for (std::uint64_t t_max : {100, 1000, 10000}) {
        auto s = base_scenario(strategies::PureAloha{0.5, 0.3}, 1.0);
        s.n_realizations = 10000;
        s.max_slots = t_max;
        s.seed = 303;
        means.push_back(arq::simulate_delay(s).mean_censored());
    }
    const double g1 = means[1] / means[0] - 1.0, g2 = means[2] / means[1] - 1.0;
    return {g1 >= divergence_growth && g2 >= divergence_growth,
            fmt("censored means %.2f, %.2f, %.2f at T=1e2,1e3,1e4; growth %.1f%%, %.1f%%, need >= %.0f%%",
                means[0], means[1], means[2], 100 * g1, 100 * g2, 100 * divergence_growth)};
}

Outcome lowdensity_scaling()
{
    const std::vector<double> grid = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    std::vector<double> x, means;
    std::size_t censored = 0;
    for (double lambda : grid) {
        auto s = base_scenario(strategies::PowerControl{0.5}, lambda);
        s.n_realizations = 10000;
        s.max_slots = 10000000;
        s.seed = 404;
        const auto st = arq::simulate_delay(s);
        x.push_back(std::log(lambda));
        means.push_back(st.mean_censored());
        censored += st.censored_count();
    }
    const double slope = fitted_log_slope(x, means);
    std::ostringstream os;
    os << fmt("log-log slope %.3f, need in [%.1f, %.1f]; censored %zu; means", slope, lowdensity_slope_lo,
              lowdensity_slope_hi, censored);
    for (double m : means)
        os << fmt(" %.1f", m);
    return {slope >= lowdensity_slope_lo && slope <= lowdensity_slope_hi, os.str()};
}

Outcome highdensity_scaling()
{
    const std::vector<double> grid = {0.5, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> means;
    bool sandwich = true;
    std::ostringstream pts;
    for (double lambda : grid) {
        auto s = base_scenario(strategies::PowerControl{0.5}, lambda);
        s.n_realizations = 10000;
        s.max_slots = 100000;
        s.seed = 505;
        const auto st = arq::simulate_delay(s);
        means.push_back(st.mean_censored());
        auto p = bounds::BoundParams::from_config(s.cfg);
        p.eta = st.eta_measured();
        p.tau = 1.0;
        p.epsilon = 0.5;
        const double lb = bounds::lb_highdensity(p);
        const double ub = bounds::ub_powercontrol(p, bounds::InterferenceFactorForm::corrected);
        const double ub_printed = bounds::ub_powercontrol(p, bounds::InterferenceFactorForm::as_printed);
        const double surv = st.survival(s.max_slots);
        const bool checked = surv < censor_limit;
        if (checked)
            sandwich = sandwich && lb <= st.mean_censored() && st.mean_censored() <= ub;
        pts << fmt("[lambda=%g mean=%.4g S(T)=%.4f lb=%.4g ub=%.4g ub_as_printed=%.4g %s] ", lambda,
                   st.mean_censored(), surv, lb, ub, ub_printed, checked ? "checked" : "censored");
    }
    std::vector<double> y;
    for (double m : means)
        y.push_back(std::log(m));
    const auto fit = oracle::linear_fit(grid, y);
    return {fit.r2 >= highdensity_r2 && fit.slope > 0.0 && sandwich,
            fmt("R2=%.4f (need >= %.2f) slope=%.3f; ", fit.r2, highdensity_r2, fit.slope) + pts.str()};
}

Outcome laplace_identity()
{
    bool pass = true;
    std::ostringstream os;
    strategies::Strategy s;
    s.rule = strategies::PureAloha{0.5, 2.0};
    for (double lambda : {0.5, 2.0}) {
        NetworkConfig cfg;
        cfg.bs_density = lambda;
        cfg.mu_density = 10.0 * lambda;
        for (std::uint64_t i = 0; i < 5; ++i) {
            const auto real = geometry::sample_realization(cfg, 606, i);
            const auto chk = bounds::laplace_product_check(real, s, cfg, 1.0, 100000, 606 + i);
            const double z = std::abs(chk.analytic - chk.empirical) / chk.std_error;
            pass = pass && z < sigma_slack;
            os << fmt("%.2f ", z);
        }
    }
    return {pass, "deviations in sigma: " + os.str()};
}

std::vector<double> sweep_means(arq::SimScenario s, const std::vector<double>& grid,
                                const std::function<arq::DelayStats(const arq::SimScenario&)>& run,
                                std::vector<double>* sds = nullptr)
{
    std::vector<double> means;
    for (double lambda : grid) {
        s.cfg.bs_density = lambda;
        s.cfg.mu_density = 10.0 * lambda;
        const auto st = run(s);
        means.push_back(st.mean_censored());
        if (sds)
            sds->push_back(st.sd_censored() / std::sqrt(double(st.n())));
    }
    return means;
}

Outcome order_invariance(const char* label, const std::vector<double>& grid, const std::vector<double>& base,
                         const std::vector<double>& improved)
{
    bool lower = true;
    std::ostringstream os;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        lower = lower && improved[i] < base[i];
        os << fmt("[lambda=%g %.4g vs %.4g] ", grid[i], improved[i], base[i]);
    }
    const double s0 = fitted_log_slope(grid, base);
    const double s1 = fitted_log_slope(grid, improved);
    const double change = std::abs(s1 - s0) / std::abs(s0);
    return {lower && change < slope_change_limit,
            fmt("%s slope %.3f vs %.3f, change %.1f%% (need < %.0f%%); ", label, s1, s0, 100 * change,
                100 * slope_change_limit) +
                os.str()};
}

Outcome coordination()
{
    const std::vector<double> grid = {1.0, 2.0, 3.0};
    auto s = base_scenario(strategies::PureAloha{0.5, 2.0}, 1.0);
    s.n_realizations = 4000;
    s.max_slots = 100000;
    s.seed = 707;
    auto run = [](const arq::SimScenario& sc) { return arq::simulate_delay(sc); };
    const auto base = sweep_means(s, grid, run);
    s.coordination_k = 7;
    const auto coord = sweep_means(s, grid, run);
    return order_invariance("k=7", grid, base, coord);
}

Outcome multi_antenna()
{
    const std::vector<double> grid = {1.0, 2.0, 3.0, 4.0};
    auto s = base_scenario(strategies::PureAloha{0.5, 2.0}, 1.0);
    s.n_realizations = 4000;
    s.max_slots = 100000;
    s.seed = 808;
    const auto base = sweep_means(s, grid, [](const arq::SimScenario& sc) { return arq::simulate_multiantenna(sc, 1); });
    const auto multi = sweep_means(s, grid, [](const arq::SimScenario& sc) { return arq::simulate_multiantenna(sc, 4); });
    return order_invariance("N=4", grid, base, multi);
}

Outcome prior_work()
{
    NetworkConfig cfg;
    cfg.noise = 0.0;
    const std::size_t n = 20000;
    auto diff = [&](bool amplifying) {
        cfg.bs_density = 0.1;
        const auto lo = channel::one_shot_connection_prob(cfg, amplifying, n, 909);
        cfg.bs_density = 10.0;
        const auto hi = channel::one_shot_connection_prob(cfg, amplifying, n, 910);
        const double se = std::hypot(lo.std_error, hi.std_error);
        return std::array<double, 3>{lo.probability, hi.probability, std::abs(lo.probability - hi.probability) / se};
    };
    const auto amp = diff(true);
    const auto cap = diff(false);
    return {amp[2] < sigma_slack && cap[2] > sigma_slack,
            fmt("amplifying Pc %.4f vs %.4f (%.2f SE, need < 3); bounded Pc %.4f vs %.4f (%.2f SE, need > 3)",
                amp[0], amp[1], amp[2], cap[0], cap[1], cap[2])};
}

Outcome enhanced_dominance()
{
    // lambda = 2 is the required point; lambda = 0.5 is added because at lambda = 2
    // both curves stay near 1 over t <= 1e3.
    bool pass = true;
    std::ostringstream os;
    for (double lambda : {2.0, 0.5}) {
        auto s = base_scenario(strategies::CsitThreshold{}, lambda);
        s.n_realizations = 4000;
        s.max_slots = 1000;
        s.seed = 1010;
        const auto real = arq::simulate_delay(s);
        const auto enh = arq::simulate_enhanced_lb_network(s);
        const double n = double(s.n_realizations);
        double worst = -1e300;
        std::uint64_t worst_t = 0;
        for (std::uint64_t t = 1; t <= s.max_slots; ++t) {
            const double sr = real.survival(t), se = enh.survival(t);
            const double sigma = std::sqrt((sr * (1 - sr) + se * (1 - se)) / n);
            const double excess = se - sr - sigma_slack * sigma;
            if (excess > worst) {
                worst = excess;
                worst_t = t;
            }
        }
        pass = pass && worst <= 0.0;
        os << fmt("[lambda=%g: max(S_enh - S_real - 3 sigma)=%.4g at t=%llu; S_real(1)=%.4f S_enh(1)=%.4f "
                  "S_real(1000)=%.4f S_enh(1000)=%.4f] ",
                  lambda, worst, static_cast<unsigned long long>(worst_t), real.survival(1), enh.survival(1),
                  real.survival(1000), enh.survival(1000));
    }
    return {pass, os.str()};
}

Outcome bound_scaling()
{
    bounds::BoundParams p;
    double lo = 1e300, hi = 0.0;
    std::ostringstream os;
    for (double e = -4.0; e <= -2.0 + 1e-9; e += 0.5) {
        p.lambda = std::pow(10.0, e);
        const double v = std::pow(p.lambda, p.alpha / 2.0) * bounds::lb_lowdensity(p);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        os << fmt("%.5f ", v);
    }
    const double spread = hi / lo - 1.0;

    std::vector<double> x, y;
    for (double lambda = 4.0; lambda <= 16.0 + 1e-9; lambda += 1.0) {
        p.lambda = lambda;
        x.push_back(lambda);
        y.push_back(std::log(bounds::lb_highdensity(p)));
    }
    const double slope = oracle::linear_fit(x, y).slope;
    const double target = pi * p.c2();
    const double rel = std::abs(slope / target - 1.0);
    return {spread < lowdensity_flatness && rel < highdensity_slope_rel,
            fmt("lambda^(alpha/2) lb_lowdensity varies by %.1f%% (need < %.0f%%): ", 100 * spread,
                100 * lowdensity_flatness) +
                os.str() + fmt("; lb_highdensity slope %.6f vs pi c2 %.6f (%.2g%%, need < 1%%)", slope, target, 100 * rel)};
}

struct Criterion {
    const char* name;
    Outcome (*run)();
};

const Criterion criteria[] = {
    {"distance laws", distance_laws},
    {"geometric delay oracle", geometric_oracle},
    {"ALOHA divergence", aloha_divergence},
    {"low-density scaling", lowdensity_scaling},
    {"high-density scaling", highdensity_scaling},
    {"Laplace product identity", laplace_identity},
    {"coordination order invariance", coordination},
    {"multi-antenna order invariance", multi_antenna},
    {"amplifying path-loss replication", prior_work},
    {"enhanced-network dominance", enhanced_dominance},
    {"bound-evaluator scaling", bound_scaling},
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (int i = 1; i <= 11; ++i) {
        if (only && i != only)
            continue;
        const auto start = std::chrono::steady_clock::now();
        const Outcome o = criteria[i - 1].run();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("CRITERION %d %s: %s (%.1f s) %s\n", i, criteria[i - 1].name, o.pass ? "PASS" : "FAIL", secs,
                    o.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
