#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cswlab/netsim.hpp"

using namespace cswlab;

static constexpr double kHb010 = 0.4689955935892812;

namespace {

// (X,Y) ~ dsbs(p) with Z an independent fair coin
JointPmf dsbs_with_coin(double p) {
    std::vector<double> t(8);
    JointPmf xy = make_dsbs(p);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                t[x * 4 + y * 2 + z] = xy.prob({x, y}) * 0.5;
    return JointPmf({2, 2, 2}, t);
}

// X -> Y -> Z, each step a BSC(p), X uniform
JointPmf markov_chain(double p) {
    std::vector<double> t(8);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                t[x * 4 + y * 2 + z] = 0.5 * (x == y ? 1 - p : p) *
                                       (y == z ? 1 - p : p);
    return JointPmf({2, 2, 2}, t);
}

JointPmf independent_coins(int n) {
    std::vector<double> t(std::size_t{1} << n, 1.0 / (1 << n));
    return JointPmf(std::vector<int>(n, 2), t);
}

}  // namespace

TEST_CASE("two-source allocation reduces to the pairwise layout") {
    JointPmf pmf = make_dsbs(0.1);
    for (int k : {4, 8, 10}) {
        MultiSourceConfig cfg{pmf, k, {}, {}, 1};
        MultiLayout ml = allocate_portions(cfg);
        PortionLayout pl = build_layout(pmf, k, 0.5);
        REQUIRE(ml.terms.size() == 1);
        CHECK(ml.terms[0].width == pl.m_cx + pl.m_cy);
        CHECK(ml.per_source[0].m_private == pl.m_vx);
        CHECK(ml.per_source[1].m_private == pl.m_vy);
        // equal split rounds the first producer's share up at odd widths
        CHECK(ml.terms[0].shares[0] == pl.m_cx);
        CHECK(ml.terms[0].shares[1] == pl.m_cy);
    }
}

TEST_CASE("an independent source gets no common share") {
    JointPmf pmf = dsbs_with_coin(0.1);
    MultiSourceConfig cfg{pmf, 4, {}, {}, 1};
    MultiLayout ml = allocate_portions(cfg);
    for (const CommonTerm& t : ml.terms) {
        if (t.subset.contains(2)) {
            CHECK(t.width == 0);
            for (int s : t.shares) CHECK(s == 0);
        }
    }
    CHECK(ml.per_source[2].m_private == 4);  // K * H(Z|X,Y) = K
}

TEST_CASE("markov chain allocation widths, K=4") {
    // widths follow round-half-up of K times the decomposition terms
    JointPmf pmf = markov_chain(0.1);
    MultiSourceConfig cfg{pmf, 4, {}, {}, 1};
    MultiLayout ml = allocate_portions(cfg);
    REQUIRE(ml.terms.size() == 4);  // three pairs and one triple
    for (const CommonTerm& t : ml.terms) {
        double target =
            conditional_mutual_information(pmf, t.subset,
                                           t.subset.complement(3)).bits;
        CHECK(t.width == static_cast<int>(std::floor(4 * target + 0.5)));
        int sum = 0;
        for (int s : t.shares) sum += s;
        CHECK(sum == t.width);
    }
}

TEST_CASE("allocation input validation") {
    JointPmf pmf5 = independent_coins(5);
    CHECK_THROWS_AS(allocate_portions({pmf5, 2, {}, {}, 1}), domain_error);
    JointPmf pmf = make_dsbs(0.1);
    CHECK_THROWS_AS(allocate_portions({pmf, 0, {}, {}, 1}), domain_error);
}

TEST_CASE("masked rate bound identities") {
    // n=2: bound = H(X,Y) - I(X;Y)
    JointPmf pmf = make_dsbs(0.1);
    MaskedRateBound b = masked_rate_bound({pmf, 3, {}, {}, 1});
    CHECK(b.sw_sum_rate_bits == doctest::Approx(1.0 + kHb010).epsilon(1e-9));
    CHECK(b.bound_bits ==
          doctest::Approx((1.0 + kHb010) - (1.0 - kHb010)).epsilon(1e-9));

    // independent sources: no common information, no savings
    MaskedRateBound bi = masked_rate_bound({independent_coins(3), 3, {}, {}, 1});
    CHECK(bi.bound_bits == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(bi.bound_bits == doctest::Approx(bi.sw_sum_rate_bits).epsilon(1e-12));

    // fully correlated pair: all of H(X,Y) is common, savings swallow it
    JointPmf same({2, 2}, {0.5, 0.0, 0.0, 0.5});
    MaskedRateBound bs = masked_rate_bound({same, 3, {}, {}, 1});
    CHECK(bs.sw_sum_rate_bits == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bs.bound_bits == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mask round trip and zero-width no-op") {
    JointPmf pmf = markov_chain(0.1);
    MultiSourceConfig cfg{pmf, 3, {}, {}, 5};
    MultiLayout ml = allocate_portions(cfg);
    MultiEncoder enc(ml, 3, 5);
    MaskPlan plan = plan_masks(cfg, ml, false);
    for (std::uint32_t seed = 0; seed < 1000; ++seed) {
        std::vector<std::uint32_t> bits = {seed & 7u, (seed >> 3) & 7u,
                                           (seed >> 6) & 7u};
        auto masked = apply_masks(plan, enc, bits);
        // re-applying the same mask words undoes the xor
        for (const MaskEntry& e : plan.entries) {
            std::uint32_t word = 0;
            for (auto& [term, producer] : e.mask_words)
                word ^= enc.common_word(producer, term, bits[producer]);
            std::uint32_t seg = (1u << e.segment_width) - 1u;
            masked[e.target_source] ^= word & seg;
        }
        for (int i = 0; i < 3; ++i)
            CHECK(masked[i] == enc.private_word(i, bits[i]));
    }
    MaskPlan empty;
    auto bare = apply_masks(empty, enc, {1, 2, 3});
    CHECK(bare[0] == enc.private_word(0, 1));
}

TEST_CASE("combination masking uses two distinct words") {
    JointPmf pmf = markov_chain(0.05);
    MultiSourceConfig cfg{pmf, 3, {}, {}, 5};
    MultiLayout ml = allocate_portions(cfg);
    MaskPlan plan = plan_masks(cfg, ml, true);
    for (const MaskEntry& e : plan.entries) {
        if (e.mask_words.size() == 2)
            CHECK(e.mask_words[0] != e.mask_words[1]);
        for (auto& [term, producer] : e.mask_words)
            CHECK(ml.terms[term].subset.contains(e.target_source));
    }
}

TEST_CASE("mask pads are the source's own shares, secure terms first") {
    JointPmf pmf = markov_chain(0.1);
    MultiSourceConfig cfg{pmf, 3, {}, {false, true, false}, 5};
    MultiLayout ml = allocate_portions(cfg);
    MaskPlan plan = plan_masks(cfg, ml, false);
    CHECK(!plan.entries.empty());
    for (const MaskEntry& e : plan.entries) {
        for (auto& [term, producer] : e.mask_words)
            CHECK(producer == e.target_source);
        if (e.target_source == 1) continue;  // its co-producers are not secure
        // source 1 sits on the secure link, so the preferred pad comes from
        // a term it co-produces
        CHECK(ml.terms[e.mask_words[0].first].subset.contains(1));
    }
}

TEST_CASE("region membership, multi-source cases") {
    JointPmf pmf = markov_chain(0.1);
    MultiSourceConfig cfg{pmf, 3, {}, {}, 1};
    double h0 = entropy(pmf, {0}).bits;
    double i01 = conditional_mutual_information(pmf, {0, 1}, {}).bits;
    double h01 = entropy(pmf, SourceSubset{0, 1}).bits;

    MultiRatePoint p;
    p.i = 0;
    p.j = 1;
    SUBCASE("case 1 boundary") {
        p.r_i = h0;
        p.term_subset = 0b011;  // key the I(S0;S1|S2) term
        p.r_ki = conditional_mutual_information(pmf, {0, 1}, {2}).bits;
        CHECK(region_member_multi(p, 1, cfg).member);
        p.r_i = h0 - 0.01;
        auto r = region_member_multi(p, 1, cfg);
        CHECK(!r.member);
        CHECK(r.violations[0] == "R_i");
    }
    SUBCASE("case 2 key rate face") {
        p.r_i = h01;
        p.r_j = h01;
        p.r_ki = i01;
        p.r_kj = i01;
        CHECK(region_member_multi(p, 2, cfg).member);
        p.r_ki = i01 - 0.01;
        CHECK(!region_member_multi(p, 2, cfg).member);
    }
    SUBCASE("independent sources need no key but full rate") {
        MultiSourceConfig ind{independent_coins(3), 3, {}, {}, 1};
        MultiRatePoint q;
        q.r_i = 0.5;  // below H(S_0) = 1
        CHECK(!region_member_multi(q, 1, ind).member);
        q.r_i = 1.0;
        q.term_subset = 0b011;
        CHECK(region_member_multi(q, 1, ind).member);  // I-terms are 0
    }
    CHECK_THROWS_AS(region_member_multi(p, 9, cfg), domain_error);
}

TEST_CASE("untapped network leaks nothing") {
    JointPmf pmf = markov_chain(0.1);
    MultiSourceConfig cfg{pmf, 3, {}, {}, 2};
    MultiLayout ml = allocate_portions(cfg);
    MultiEncoder enc(ml, 3, 2);
    MaskPlan plan = plan_masks(cfg, ml, false);
    for (const auto& row : simulate_network(cfg, enc, plan, {}))
        CHECK(row.measured_bits == 0.0);
}

TEST_CASE("independent sources leak nothing across links") {
    MultiSourceConfig cfg{independent_coins(3), 3, {}, {}, 3};
    MultiLayout ml = allocate_portions(cfg);
    MultiEncoder enc(ml, 3, 3);
    MaskPlan plan = plan_masks(cfg, ml, false);
    auto rows = simulate_network(cfg, enc, plan, {1});
    CHECK(rows[0].measured_bits == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rows[2].measured_bits == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("cross-source leakage matches the oracle identity") {
    JointPmf pmf = markov_chain(0.1);
    MultiSourceConfig cfg{pmf, 3, {}, {}, 7};
    MultiLayout ml = allocate_portions(cfg);
    MultiEncoder enc(ml, 3, 7);
    LeakageReport r = multi_source_leakage(cfg, enc, 0, 1);
    // tap link 1 with no masking and recompute through simulate_network
    MaskPlan nomask;
    auto rows = simulate_network(cfg, enc, nomask, {1});
    CHECK(r.measured_bits == doctest::Approx(rows[0].measured_bits).epsilon(1e-9));
    CHECK(r.measured_bits >= 0.0);
    CHECK_THROWS_AS(multi_source_leakage(cfg, enc, 0, 5), domain_error);
}

TEST_CASE("masking never increases leakage, exhaustive adversaries") {
    JointPmf pmf = markov_chain(0.1);
    for (int k : {2, 3}) {
        MultiSourceConfig cfg{pmf, k, {}, {}, 4};
        MultiLayout ml = allocate_portions(cfg);
        MultiEncoder enc(ml, k, 4);
        MaskPlan plan = plan_masks(cfg, ml, false);
        MaskPlan nomask;
        for (unsigned set = 1; set < 8; ++set) {
            std::vector<int> tapped;
            for (int i = 0; i < 3; ++i)
                if (set & (1u << i)) tapped.push_back(i);
            auto with = simulate_network(cfg, enc, plan, tapped);
            auto without = simulate_network(cfg, enc, nomask, tapped);
            for (int i = 0; i < 3; ++i)
                CHECK(with[i].measured_bits <= without[i].measured_bits + 1e-9);
        }
    }
}

TEST_CASE("combination masking survives one revealed word") {
    // with one pad compromised, the other own-share pad is still uniform and
    // independent of the private word, so the masked segment leaks nothing
    JointPmf pmf = markov_chain(0.1);
    // weights steer both of source 0's term shares to source 0, so a
    // two-word combination pad exists at this small K
    MultiSourceConfig cfg{pmf, 3, {1.0, 0.01, 0.01}, {}, 6};
    MultiLayout ml = allocate_portions(cfg);
    MultiEncoder enc(ml, 3, 6);
    MaskPlan plan = plan_masks(cfg, ml, true);
    bool found_combination = false;
    for (const MaskEntry& e : plan.entries) {
        if (e.mask_words.size() != 2 || e.segment_width == 0) continue;
        found_combination = true;
        const int i = e.target_source;
        const int m_priv = ml.per_source[i].m_private;
        const std::uint32_t seg = (1u << e.segment_width) - 1u;
        for (auto revealed : e.mask_words) {
            auto masked_word = [&](const std::vector<std::uint32_t>& w) {
                return apply_masks(plan, enc, w)[i];
            };
            auto pad = [&, revealed](const std::vector<std::uint32_t>& w) {
                return enc.common_word(revealed.second, revealed.first,
                                       w[revealed.second]);
            };
            auto target = [&](const std::vector<std::uint32_t>& w) {
                return enc.private_word(i, w[i]) & seg;
            };
            int pad_bits = 8;  // generous upper bound on the share width
            ObservationMap seg_view{0, e.segment_width,
                                    [&](const auto& w, std::uint64_t) {
                                        return std::uint64_t{target(w)};
                                    }};
            ObservationMap obs_view{
                0, m_priv + pad_bits, [&](const auto& w, std::uint64_t) {
                    return std::uint64_t{masked_word(w)} |
                           (std::uint64_t{pad(w)} << m_priv);
                }};
            ObservationMap joint_view{
                0, e.segment_width + m_priv + pad_bits,
                [&](const auto& w, std::uint64_t) {
                    return std::uint64_t{target(w)} |
                           (std::uint64_t{masked_word(w)} << e.segment_width) |
                           (std::uint64_t{pad(w)} << (e.segment_width + m_priv));
                }};
            double mi = exact_observation_entropy(pmf, 3, seg_view) +
                        exact_observation_entropy(pmf, 3, obs_view) -
                        exact_observation_entropy(pmf, 3, joint_view);
            CHECK(std::abs(mi) <= 1e-9);
        }
    }
    CHECK(found_combination);
}
