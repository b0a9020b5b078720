#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cellcap/arq_sim.hpp"
#include "cellcap/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

using namespace cellcap;
using namespace cellcap::strategies;
using channel::FadingModel;

namespace {

Strategy make(Rule rule, double m = 1.0)
{
    Strategy s;
    s.rule = rule;
    s.avg_power = m;
    return s;
}

} // namespace

TEST_CASE("power control decisions")
{
    NetworkConfig cfg;
    Rng rng = make_stream(1, 0, Stream::slots);
    const auto s = make(PowerControl{0.5});

    const auto far = link_policy(s, cfg, channel::pathloss(2.0, 3.0), FadingModel::exp_unit());
    CHECK(far.power == doctest::Approx(16.0));
    CHECK(far.p == doctest::Approx(0.0625));

    const auto near = link_policy(s, cfg, channel::pathloss(0.5, 3.0), FadingModel::exp_unit());
    CHECK(near.power == doctest::Approx(2.0));
    CHECK(near.p == doctest::Approx(0.5));

    for (double d : {0.1, 0.9, 1.3, 2.0, 7.5, 40.0}) {
        const auto pol = link_policy(s, cfg, channel::pathloss(d, 3.0), FadingModel::exp_unit());
        CHECK(pol.p * pol.power == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(pol.p <= 0.5 + 1e-15);
        const auto tx = decide(s, cfg, d, std::nullopt, rng);
        CHECK(tx.power == doctest::Approx(pol.power));
    }
}

TEST_CASE("pure ALOHA transmits with frequency p and ignores distance")
{
    NetworkConfig cfg;
    const auto s = make(PureAloha{0.25, 4.0});
    Rng rng = make_stream(2, 0, Stream::slots);
    const int n = 100000;
    int tx = 0;
    for (int i = 0; i < n; ++i) {
        const auto dec = decide(s, cfg, 0.3 + 10.0 * (i % 7), std::nullopt, rng);
        tx += dec.transmit;
        CHECK(dec.power == 4.0);
    }
    CHECK(double(tx) / n == doctest::Approx(0.25).epsilon(0.005 / 0.25));
}

TEST_CASE("distance ALOHA follows the path gain")
{
    NetworkConfig cfg;
    const auto s = make(DistanceAloha{0.8, 0.5, 1.0});
    const auto pol = link_policy(s, cfg, channel::pathloss(2.0, 3.0), FadingModel::exp_unit());
    CHECK(pol.power == doctest::Approx(4.0));
    CHECK(pol.p == doctest::Approx(0.25));
    const auto close = link_policy(s, cfg, 1.0, FadingModel::exp_unit());
    CHECK(close.power == doctest::Approx(0.5));
    CHECK(close.p == doctest::Approx(0.8));
}

TEST_CASE("threshold solution with stronger scalar fading")
{
    const auto sol = solve_threshold(1.0, 2.0, 1.0, 1.0, FadingModel::stronger_scalar());
    CHECK_FALSE(sol.case1);
    CHECK(sol.delta == doctest::Approx(std::numbers::ln2).epsilon(1e-14));
    CHECK(sol.delta == doctest::Approx(0.6931).epsilon(1e-4));
    CHECK(threshold_power(sol.delta, 2.0, 1.0, FadingModel::stronger_scalar()) ==
          doctest::Approx(1.0).epsilon(1e-8));

    const auto case1 = solve_threshold(1.0, 1.0, 1.0, 1.0, FadingModel::stronger_scalar());
    CHECK(case1.case1);
    CHECK(case1.delta == 0.0);
    CHECK(success_prob_threshold(case1.delta, FadingModel::stronger_scalar()) == 1.0);
}

TEST_CASE("threshold solution with exponential fading meets the power budget")
{
    const auto sol = solve_threshold(1.0, 2.0, 1.0, 1.0, FadingModel::exp_unit());
    CHECK(sol.delta == doctest::Approx(0.553221503593010).epsilon(1e-12));
    const double residual = threshold_power(sol.delta, 2.0, 1.0, FadingModel::exp_unit()) - 1.0;
    CHECK(std::abs(residual) <= 1e-8);
}

TEST_CASE("threshold solution for vector fading laws")
{
    const auto c4 = solve_threshold_for_target(1.0, 6.0, 1.0, FadingModel::chisq(4));
    CHECK(c4.delta == doctest::Approx(2.674060313723560).epsilon(1e-12));
    CHECK(std::abs(threshold_power(c4.delta, 6.0, 1.0, FadingModel::chisq(4)) - 1.0) <= 1e-8);

    const auto v3 = solve_threshold_for_target(1.0, 6.0, 1.0, FadingModel::stronger_vector(3));
    CHECK(v3.delta == doctest::Approx(3.0 * std::numbers::ln2).epsilon(1e-12));
    CHECK(v3.delta == doctest::Approx(2.079441541679836).epsilon(1e-12));
    CHECK(std::abs(threshold_power(v3.delta, 6.0, 1.0, FadingModel::stronger_vector(3)) - 1.0) <= 1e-8);

    // chisq(4) with target 2: mean power at delta = 0 is 2 / 3 < M, so the budget covers every state.
    CHECK(solve_threshold_for_target(1.0, 2.0, 1.0, FadingModel::chisq(4)).case1);
}

TEST_CASE("threshold residuals stay small across path gains")
{
    for (double l : {1.0, 0.3, 0.05, 1e-3}) {
        for (const auto& law : {FadingModel::exp_unit(), FadingModel::stronger_scalar(), FadingModel::chisq(3)}) {
            const auto sol = solve_threshold_for_target(1.0, 2.0, l, law);
            if (sol.case1)
                continue;
            CAPTURE(l);
            CHECK(std::abs(threshold_power(sol.delta, 2.0, l, law) - 1.0) <= 1e-8);
        }
    }
}

TEST_CASE("threshold success probability")
{
    const auto ss = FadingModel::stronger_scalar();
    CHECK(success_prob_threshold(std::numbers::ln2, ss) == doctest::Approx(0.846573590279973).epsilon(1e-13));
    CHECK(success_prob_threshold(std::numbers::ln2, ss) == doctest::Approx(0.8466).epsilon(1e-4));
    CHECK(success_prob_threshold(0.0, ss) == 1.0);
    CHECK_THROWS_AS(success_prob_threshold(-1.0, ss), std::domain_error);

    Rng rng = make_stream(3, 0, Stream::auxiliary);
    const int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
        hits += channel::draw_fading(ss, rng) >= std::numbers::ln2;
    const double p = 0.846573590279973;
    CHECK(std::abs(double(hits) / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("interferer assignment is uniform over the cell")
{
    // BS 0 serves the origin; BS 1 has four users, BS 2 one, BS 3 none.
    const auto real = geometry::build_realization(
        {{0.1, 0.0}, {10.0, 0.0}, {-10.0, 0.0}, {0.0, 30.0}},
        {{10.5, 0.0}, {11.0, 0.0}, {11.5, 0.0}, {12.0, 0.0}, {-10.5, 0.0}}, 50.0);
    REQUIRE(real.serving == 0);
    REQUIRE(real.cell_size(1) == 4);
    Rng rng = make_stream(4, 0, Stream::slots);
    std::map<double, int> freq;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto a = interferer_assignment(real, rng);
        CHECK_FALSE(a[0].has_value());
        CHECK_FALSE(a[3].has_value());
        REQUIRE(a[2].has_value());
        CHECK(*a[2] == doctest::Approx(0.5));
        ++freq[*a[1]];
    }
    REQUIRE(freq.size() == 4);
    for (const auto& [d, count] : freq)
        CHECK(double(count) / n == doctest::Approx(0.25).epsilon(0.01 / 0.25));
    CHECK_THROWS_AS(draw_served_mu(real, 3, rng), request_error);
}

TEST_CASE("every strategy respects the average power budget")
{
    NetworkConfig cfg;
    const std::vector<Strategy> all = {make(PureAloha{0.5, 2.0}), make(DistanceAloha{1.0, 0.2, 1.0}),
                                       make(PowerControl{0.5}), make(CsitThreshold{})};
    std::exponential_distribution<double> expo(1.0);
    for (const auto& s : all) {
        CAPTURE(s.name());
        for (double d : {0.5, 1.7, 4.0}) {
            Rng rng = make_stream(5, 0, Stream::slots);
            double spent = 0.0, spent_sq = 0.0;
            const int n = 100000;
            for (int i = 0; i < n; ++i) {
                const auto tx = decide(s, cfg, d, expo(rng), rng);
                const double v = tx.transmit ? tx.power : 0.0;
                spent += v;
                spent_sq += v * v;
            }
            const double m = spent / n;
            const double se = std::sqrt(std::max(0.0, spent_sq / n - m * m) / n);
            CAPTURE(d);
            CAPTURE(se);
            // Far links spend rarely but heavily, so the sample mean carries noise beyond the 2% margin.
            CHECK(m <= 1.02 * s.avg_power + 3.0 * se);
        }
    }
}

TEST_CASE("threshold transmissions always meet the target without interference")
{
    NetworkConfig cfg;
    cfg.sinr_threshold = 2.0;
    cfg.noise = 0.5;
    const auto s = make(CsitThreshold{});
    const double d = 1.6;
    const double l = channel::pathloss(d, cfg.pathloss_exp);
    const auto pol = link_policy(s, cfg, l, FadingModel::exp_unit());
    Rng rng = make_stream(6, 0, Stream::slots);
    std::exponential_distribution<double> expo(1.0);
    int tx_count = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double h = expo(rng);
        const auto tx = decide(s, cfg, d, h, rng);
        CHECK(tx.transmit == (h >= pol.delta));
        if (tx.transmit) {
            ++tx_count;
            // Received power equals the target beta (gamma + N) exactly.
            CHECK(tx.power * h * l == doctest::Approx(csit_target(cfg)).epsilon(1e-12));
            CHECK(tx.power * h * l / cfg.noise > cfg.sinr_threshold);
        }
    }
    const double p = pol.p;
    CHECK(std::abs(double(tx_count) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("fixed cutoffs never undercut the budget-driven one")
{
    NetworkConfig cfg;
    const auto auto_pol = link_policy(make(CsitThreshold{}), cfg, 0.2, FadingModel::exp_unit());
    const auto low = link_policy(make(CsitThreshold{0.01}), cfg, 0.2, FadingModel::exp_unit());
    const auto high = link_policy(make(CsitThreshold{5.0}), cfg, 0.2, FadingModel::exp_unit());
    CHECK(low.delta == auto_pol.delta);
    CHECK(high.delta == 5.0);
}

TEST_CASE("threshold decisions require the fading gain")
{
    NetworkConfig cfg;
    Rng rng = make_stream(7, 0, Stream::slots);
    CHECK_THROWS_AS(decide(make(CsitThreshold{}), cfg, 1.0, std::nullopt, rng), std::invalid_argument);
    const auto pol = link_policy(make(CsitThreshold{}), cfg, 1.0, FadingModel::exp_unit());
    CHECK_THROWS_AS(decide(pol, std::nullopt, rng), std::invalid_argument);
}

TEST_CASE("validation names the offending key")
{
    NetworkConfig cfg;
    auto key_of = [&](const Strategy& s) {
        try {
            s.validate(cfg);
        } catch (const config_error& e) {
            return e.key();
        }
        return std::string();
    };
    CHECK(key_of(make(PureAloha{0.0, 1.0})) == "aloha_p");
    CHECK(key_of(make(PureAloha{0.5, 3.0})) == "aloha_power");
    CHECK(key_of(make(DistanceAloha{1.5, 1.0, 1.0})) == "distance_p0");
    CHECK(key_of(make(DistanceAloha{1.0, 2.0, 1.0})) == "distance_power0");
    CHECK(key_of(make(DistanceAloha{1.0, 1.0, -1.0})) == "distance_rho");
    CHECK(key_of(make(PowerControl{1.0})) == "epsilon");
    CHECK(key_of(make(CsitThreshold{-0.5})) == "csit_delta");
    CHECK(key_of(make(PureAloha{0.5, 1.0}, 0.0)) == "avg_power");
    Strategy t = make(PureAloha{0.5, 1.0});
    t.tau = 0.5;
    CHECK(key_of(t) == "tau");
    CHECK(key_of(make(PureAloha{0.5, 2.0})).empty());

    cfg.sinr_threshold = 3.0;
    CHECK(key_of(make(PowerControl{0.5})) == "epsilon");
    try {
        make(PowerControl{0.5}).validate(cfg);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("sinr_threshold * proc_gain * (1 - epsilon) < 1") != std::string::npos);
    }
}

TEST_CASE("distance ALOHA delay at fixed distance approaches 1/p as power grows")
{
    NetworkConfig cfg;
    cfg.mu_density = 0.0;
    const double d0 = 1.5;
    const double l = channel::pathloss(d0, cfg.pathloss_exp);
    const double p = 0.5;
    auto provider = [&](std::uint64_t) { return geometry::build_realization({{d0, 0.0}}, {}, 10.0); };
    double prev = 1e300;
    for (double scale : {0.5, 2.0, 8.0, 64.0}) {
        const double power = cfg.sinr_threshold * cfg.noise * scale / l;
        arq::SimScenario sc;
        sc.cfg = cfg;
        sc.cfg.avg_power = 1e4;
        sc.strategy = make(DistanceAloha{p, cfg.sinr_threshold * cfg.noise * scale, 1.0}, 1e4);
        sc.n_realizations = 20000;
        sc.max_slots = 100000;
        const auto st = arq::simulate_delay(sc, provider);
        const double expected = 1.0 / (p * std::exp(-cfg.sinr_threshold * cfg.noise / (power * l)));
        CAPTURE(scale);
        CHECK(st.mean_censored() == doctest::Approx(expected).epsilon(0.04));
        CHECK(st.mean_censored() < prev * 1.02);
        prev = st.mean_censored();
    }
    CHECK(prev == doctest::Approx(1.0 / p).epsilon(0.04));
}
