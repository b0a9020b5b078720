#include "cellcap/arq_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace cellcap::arq {

namespace {

using strategies::LinkPolicy;

struct Interferer {
    double gain = 0.0;         // path gain towards the typical MU
    std::size_t first = 0;     // into the policy table
    std::size_t count = 0;     // policies for this BS, 1 when all its MUs agree
};

/// Per-realization link table, built once and reused in every slot.
struct LinkTable {
    LinkPolicy serving;
    double serving_gain = 1.0;
    std::vector<Interferer> interferers; // nearest first
    std::vector<LinkPolicy> policies;
    double eta = 0.0;
};

class PolicyCache {
public:
    PolicyCache(const SimScenario& s, const NetworkConfig& cfg)
        : s_(s), cfg_(cfg), unit_(strategies::link_policy(s.strategy, cfg, 1.0, fading_))
    {
    }

    LinkPolicy operator()(double gain) const
    {
        if (gain == 1.0)
            return unit_;
        return strategies::link_policy(s_.strategy, cfg_, gain, fading_);
    }

private:
    const SimScenario& s_;
    const NetworkConfig& cfg_;
    channel::FadingModel fading_ = channel::FadingModel::exp_unit();
    LinkPolicy unit_;
};

channel::FadingModel serving_fading(const NetworkConfig& cfg)
{
    return cfg.antennas > 1 ? channel::FadingModel::chisq(cfg.antennas) : channel::FadingModel::exp_unit();
}

LinkTable build_table(const SimScenario& s, const NetworkConfig& cfg,
                      const geometry::NetworkRealization& real)
{
    const double alpha = cfg.pathloss_exp;
    LinkTable t;
    t.serving_gain = s.enhanced_mode ? 1.0 : channel::pathloss(real.typical_d0, alpha);
    t.serving = strategies::link_policy(s.strategy, cfg, t.serving_gain, serving_fading(cfg));

    const PolicyCache cache(s, s.cfg);
    const std::size_t nb = real.bs_count();
    const std::size_t silenced = std::min(s.coordination_k, nb - 1);
    double eta_sum = 0.0;
    std::size_t eta_n = 0;
    for (std::size_t rank = 1; rank < nb; ++rank) {
        const std::size_t b = real.bs_order[rank];
        if (!real.active[b])
            continue;
        const std::size_t first = t.policies.size();
        double p_sum = 0.0;
        bool uniform = true;
        for (double d : real.cell_distances(b)) {
            const double g = channel::pathloss(d, alpha);
            t.policies.push_back(cache(g));
            p_sum += t.policies.back().p;
            uniform = uniform && t.policies.back() == t.policies[first];
        }
        const std::size_t cnt = real.cell_size(b);
        eta_sum += p_sum / double(cnt);
        ++eta_n;
        if (rank <= silenced) {
            t.policies.resize(first);
            continue;
        }
        if (uniform)
            t.policies.resize(first + 1);
        t.interferers.push_back({channel::pathloss(real.bs_dist[b], alpha), first, uniform ? 1 : cnt});
    }
    t.eta = eta_n > 0 ? eta_sum / double(eta_n) : 0.0;
    return t;
}

/// Failures before the first success of a Bernoulli(q) sequence.
std::uint64_t geometric_gap(double q, Rng& rng)
{
    if (q >= 1.0)
        return 0;
    const double u = 1.0 - std::generate_canonical<double, 53>(rng); // (0, 1]
    const double g = std::floor(std::log(u) / std::log1p(-q));
    if (!(g < 1.8e19))
        return std::numeric_limits<std::uint64_t>::max() / 2;
    return static_cast<std::uint64_t>(g);
}

/// Interference from the table's BSs, stopping early once it reaches `budget`.
double accumulate_interference(const LinkTable& t, double budget, Rng& rng)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    double total = 0.0;
    for (const auto& z : t.interferers) {
        std::size_t idx = z.first;
        if (z.count > 1)
            idx += std::uniform_int_distribution<std::size_t>(0, z.count - 1)(rng);
        const LinkPolicy& pol = t.policies[idx];
        if (unif(rng) >= pol.p)
            continue;
        double power = pol.power;
        if (pol.kind == LinkPolicy::Kind::threshold) {
            // Own-link gain conditioned on reaching delta; EXP(1) is memoryless.
            const double g = pol.delta + expo(rng);
            power = pol.coef / g;
        }
        total += power * expo(rng) * z.gain;
        if (total >= budget)
            return total;
    }
    return total;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace

void SimScenario::validate() const
{
    cfg.validate();
    strategy.validate(cfg);
    if (strategy.avg_power != cfg.avg_power)
        throw config_error("avg_power", "strategy and network disagree on the power budget");
    if (max_slots < 1)
        throw config_error("max_slots", "must be at least 1");
    if (n_realizations < 1)
        throw config_error("realizations", "must be at least 1");
    if (!(double(coordination_k) < cfg.window_mean_points))
        throw config_error("coordination_k", "must be below the expected window BS count");
    if (threads < 1)
        throw config_error("threads", "must be at least 1");
}

DelayStats DelayStats::from_samples(const std::vector<DelaySample>& samples, std::uint64_t max_slots,
                                    double bs_density)
{
    DelayStats st;
    st.n_ = samples.size();
    st.max_slots_ = max_slots;
    st.lambda_ = bs_density;
    if (samples.empty())
        return st;
    double sum = 0.0, n0 = 0.0, eta = 0.0;
    for (const auto& s : samples) {
        const std::uint64_t v = std::min(s.delay, max_slots);
        if (s.censored || s.delay > max_slots)
            ++st.censored_;
        else
            st.delays_.push_back(s.delay);
        sum += double(v);
        n0 += double(s.n0);
        eta += s.eta;
    }
    const double n = double(st.n_);
    st.mean_ = sum / n;
    st.mean_n0_ = n0 / n;
    st.eta_ = eta / n;
    double ss = 0.0;
    for (const auto& s : samples) {
        const double dv = double(std::min(s.delay, max_slots)) - st.mean_;
        ss += dv * dv;
    }
    st.sd_ = st.n_ > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::sort(st.delays_.begin(), st.delays_.end());
    return st;
}

double DelayStats::survival(std::uint64_t t) const
{
    if (n_ == 0)
        return 0.0;
    const auto above = static_cast<std::size_t>(delays_.end() - std::upper_bound(delays_.begin(), delays_.end(), t));
    return double(above + censored_) / double(n_);
}

std::vector<double> DelayStats::survival_curve(std::uint64_t t_end) const
{
    t_end = std::min(t_end, max_slots_);
    std::vector<double> out(t_end + 1);
    for (std::uint64_t t = 0; t <= t_end; ++t)
        out[t] = survival(t);
    return out;
}

double DelayStats::mean_truncated(std::uint64_t r) const
{
    if (r == 0 || r > max_slots_)
        throw request_error("mean_truncated: horizon must lie in [1, max_slots]");
    double sum = 0.0;
    std::size_t below = 0;
    for (std::uint64_t d : delays_) {
        if (d > r)
            break;
        sum += double(d);
        ++below;
    }
    sum += double(r) * double(n_ - below);
    return sum / double(n_);
}

double DelayStats::ci_halfwidth() const noexcept
{
    return n_ > 0 ? 1.96 * sd_ / std::sqrt(double(n_)) : 0.0;
}

double finite_r_capacity(const DelayStats& stats, std::uint64_t r, double lambda)
{
    if (r == 0 || r > stats.max_slots())
        throw request_error("finite_r_capacity: R must lie in [1, max_slots]");
    return lambda * (1.0 - stats.survival(r)) / stats.mean_truncated(r);
}

DelaySample simulate_realization(const SimScenario& s, const geometry::NetworkRealization& real,
                                 Rng& slots)
{
    NetworkConfig cfg = s.cfg;
    if (s.enhanced_mode)
        cfg.noise = 0.0;
    const LinkTable t = build_table(s, cfg, real);
    const auto fading = serving_fading(cfg);

    DelaySample out;
    out.n0 = real.n0;
    out.eta = t.eta;
    out.delay = s.max_slots;
    out.censored = true;

    const double q = t.serving.p;
    if (!(q > 0.0))
        return out;

    const double beta = cfg.sinr_threshold;
    const double gamma = cfg.proc_gain;
    std::uint64_t slot = 0;
    for (;;) {
        const std::uint64_t gap = geometric_gap(q, slots);
        if (gap >= s.max_slots - slot)
            return out;
        slot += gap + 1;
        double signal;
        if (t.serving.kind == LinkPolicy::Kind::threshold)
            signal = t.serving.coef * t.serving_gain;
        else
            signal = t.serving.power * channel::draw_fading(fading, slots) * t.serving_gain;
        const double budget = (signal / beta - cfg.noise) / gamma;
        if (!(budget > 0.0))
            continue;
        if (accumulate_interference(t, budget, slots) < budget) {
            out.delay = slot;
            out.censored = false;
            return out;
        }
    }
}

std::vector<DelaySample> simulate_samples(const SimScenario& s, const RealizationProvider& provider)
{
    s.validate();
    std::vector<DelaySample> samples(s.n_realizations);
    parallel_for(s.n_realizations, s.threads, [&](std::size_t i) {
        const auto real = provider(i);
        Rng rng = make_stream(s.seed, i, Stream::slots);
        samples[i] = simulate_realization(s, real, rng);
    });
    return samples;
}

std::vector<DelaySample> simulate_samples(const SimScenario& s)
{
    return simulate_samples(s, [&](std::uint64_t i) { return geometry::sample_realization(s.cfg, s.seed, i); });
}

DelayStats simulate_delay(const SimScenario& s, const RealizationProvider& provider)
{
    return DelayStats::from_samples(simulate_samples(s, provider), s.max_slots, s.cfg.bs_density);
}

DelayStats simulate_delay(const SimScenario& s)
{
    return DelayStats::from_samples(simulate_samples(s), s.max_slots, s.cfg.bs_density);
}

DelayStats simulate_enhanced_lb_network(const SimScenario& s)
{
    SimScenario e = s;
    e.enhanced_mode = true;
    return simulate_delay(e);
}

DelayStats simulate_multiantenna(const SimScenario& s, int n_ant)
{
    if (n_ant < 1)
        throw config_error("antennas", "must be at least 1");
    SimScenario m = s;
    m.cfg.antennas = n_ant;
    return simulate_delay(m);
}

} // namespace cellcap::arq
