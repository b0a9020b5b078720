#include "cellcap/channel.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace cellcap::channel {

double FadingModel::gamma_shape() const
{
    switch (kind) {
    case FadingKind::exp_unit:
        return 1.0;
    case FadingKind::stronger_scalar:
        return 2.0;
    case FadingKind::chisq_2N:
        if (n_ant < 1)
            throw std::domain_error("chisq fading needs n_ant >= 1");
        return double(n_ant);
    case FadingKind::stronger_vector_N:
        if (n_ant < 1)
            throw std::domain_error("stronger vector fading needs n_ant >= 1");
        return 2.0;
    }
    throw std::domain_error("unknown fading kind");
}

double FadingModel::gamma_scale() const
{
    return kind == FadingKind::stronger_vector_N ? double(n_ant) : 1.0;
}

double FadingModel::mean() const
{
    return gamma_shape() * gamma_scale();
}

double FadingModel::pdf(double x) const
{
    if (x < 0.0)
        return 0.0;
    const boost::math::gamma_distribution<double> g(gamma_shape(), gamma_scale());
    return boost::math::pdf(g, x);
}

double FadingModel::survival(double x) const
{
    if (x <= 0.0)
        return 1.0;
    return boost::math::gamma_q(gamma_shape(), x / gamma_scale());
}

PathGain pathloss_checked(double d, double alpha, bool amplifying)
{
    if (!(d >= 0.0))
        throw std::domain_error("pathloss: distance must be non-negative");
    if (!(alpha > 2.0))
        throw std::domain_error("pathloss: alpha must exceed 2");
    if (amplifying) {
        if (d == 0.0)
            return {std::numeric_limits<double>::max(), true};
        return {std::pow(d, -alpha), false};
    }
    if (d <= 1.0)
        return {1.0, false};
    return {std::pow(d, -alpha), false};
}

double draw_fading(const FadingModel& model, Rng& rng)
{
    const double shape = model.gamma_shape();
    if (shape == 1.0)
        return std::exponential_distribution<double>(1.0)(rng) * model.gamma_scale();
    return std::gamma_distribution<double>(shape, model.gamma_scale())(rng);
}

SlotOutcome compute_sinr(const geometry::NetworkRealization& real,
                         std::span<const TxDecision> decisions, std::span<const double> fading,
                         const NetworkConfig& cfg, std::span<const std::size_t> silenced,
                         bool amplifying)
{
    const std::size_t nb = real.bs_count();
    if (decisions.size() < nb || fading.size() < nb)
        throw std::invalid_argument("compute_sinr: decisions and fading must cover every BS");
    std::vector<bool> muted(nb, false);
    for (std::size_t b : silenced) {
        if (b == real.serving)
            throw std::invalid_argument("compute_sinr: the serving BS cannot be silenced");
        muted.at(b) = true;
    }

    SlotOutcome out;
    const auto& srv = decisions[real.serving];
    out.transmitted = srv.transmit;
    if (srv.transmit)
        out.signal_power =
            srv.power * fading[real.serving] * pathloss(real.typical_d0, cfg.pathloss_exp, amplifying);

    for (std::size_t b = 0; b < nb; ++b) {
        if (b == real.serving || muted[b] || !real.active[b] || !decisions[b].transmit)
            continue;
        out.interference +=
            decisions[b].power * fading[b] * pathloss(real.bs_dist[b], cfg.pathloss_exp, amplifying);
    }

    if (out.transmitted) {
        const double denom = cfg.proc_gain * out.interference + cfg.noise;
        out.sinr = denom > 0.0 ? out.signal_power / denom : std::numeric_limits<double>::infinity();
        out.success = out.sinr > cfg.sinr_threshold;
    }
    return out;
}

ConnectionEstimate one_shot_connection_prob(const NetworkConfig& cfg, bool amplifying,
                                            std::size_t n_real, std::uint64_t seed)
{
    if (n_real == 0)
        throw std::invalid_argument("one_shot_connection_prob: n_real must be positive");
    NetworkConfig geo = cfg;
    geo.mu_density = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_real; ++i) {
        const auto real = geometry::sample_realization(geo, seed, i);
        Rng rng = make_stream(seed, i, Stream::slots);
        std::exponential_distribution<double> expo(1.0);
        const double signal = expo(rng) * pathloss(real.typical_d0, cfg.pathloss_exp, amplifying);
        double interference = 0.0;
        for (std::size_t b = 0; b < real.bs_count(); ++b) {
            const double h = expo(rng);
            if (b != real.serving)
                interference += h * pathloss(real.bs_dist[b], cfg.pathloss_exp, amplifying);
        }
        const double denom = cfg.proc_gain * interference + cfg.noise;
        const double sinr = denom > 0.0 ? signal / denom : std::numeric_limits<double>::infinity();
        if (sinr > cfg.sinr_threshold)
            ++hits;
    }
    ConnectionEstimate est;
    est.n = n_real;
    est.probability = double(hits) / double(n_real);
    est.std_error = std::sqrt(est.probability * (1.0 - est.probability) / double(n_real));
    return est;
}

} // namespace cellcap::channel
