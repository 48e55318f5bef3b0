#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cswlab/cipher.hpp"

using namespace cswlab;

namespace {

JointPmf dsbs01() { return make_dsbs(0.1); }

PortionLayout small_layout() { return PortionLayout::parse("3:1,2,2,1"); }

}  // namespace

TEST_CASE("case table") {
    CipherCase c1 = CipherCase::from_id(1);
    CHECK(c1.tx_leaked);
    CHECK(c1.ty_leaked);
    CHECK(c1.x_secret);
    CHECK(c1.y_secret);
    CipherCase c2 = CipherCase::from_id(2);
    CHECK(!c2.y_secret);
    CipherCase c4 = CipherCase::from_id(4);
    CHECK(c4.tx_leaked);
    CHECK(!c4.ty_leaked);
    CHECK(!c4.x_secret);
    CHECK(c4.y_secret);
    CipherCase c5 = CipherCase::from_id(5);
    CHECK(!c5.ty_leaked);
    CHECK(c5.key_portion() == Portion::v_cx);
    for (int id : {1, 2, 3, 4})
        CHECK(CipherCase::from_id(id).key_portion() == Portion::v_cy);
    CHECK_THROWS_AS(CipherCase::from_id(0), domain_error);
    CHECK_THROWS_AS(CipherCase::from_id(6), domain_error);
}

TEST_CASE("key sizing") {
    PortionLayout l = small_layout();
    CipherSplit split = CipherSplit::half_of(l);
    JointPmf pmf = dsbs01();
    CipherCase c = CipherCase::from_id(1);
    KeySchedule lk = build_keys(c, l, split, 0.9, KeyVariant::long_key, pmf, 7);
    CHECK(lk.common_width == 3);  // ceil(3 * 0.9)
    CHECK(lk.total_random_bits == 3);
    KeySchedule zero = build_keys(c, l, split, 0.0, KeyVariant::long_key, pmf, 7);
    CHECK(zero.total_random_bits == 0);
    CHECK(zero.words.empty());
    CHECK_THROWS_AS(
        build_keys(c, l, split, 10.0, KeyVariant::long_key, pmf, 7),
        domain_error);
    // case 2 is keyed for X only, so its target tops out at H(X)
    CHECK_THROWS_AS(build_keys(CipherCase::from_id(2), l, split, 1.2,
                               KeyVariant::long_key, pmf, 7),
                    domain_error);
}

TEST_CASE("decryption identity, all cases and variants") {
    JointPmf pmf = dsbs01();
    PortionLayout l = small_layout();
    CipherSplit split = CipherSplit::half_of(l);
    for (int id = 1; id <= 5; ++id) {
        CipherCase c = CipherCase::from_id(id);
        for (KeyVariant v : {KeyVariant::long_key, KeyVariant::composite}) {
            for (std::uint64_t seed = 1; seed <= 40; ++seed) {
                KeySchedule keys = build_keys(c, l, split, 0.6, v, pmf, seed);
                LinearEncoder enc(l, seed);
                SourceRealization r{3, static_cast<std::uint32_t>(seed % 8),
                                    static_cast<std::uint32_t>((seed / 8) % 8)};
                CodewordBundle b = enc.encode(r);
                CipherBundle ct = encrypt(b, l, split, keys, c);
                CodewordBundle back = decrypt(ct, l, split, keys, c);
                REQUIRE(back.v_x == b.v_x);
                REQUIRE(back.v_cx == b.v_cx);
                REQUIRE(back.v_cy == b.v_cy);
                REQUIRE(back.v_y == b.v_y);
            }
        }
    }
}

TEST_CASE("key component stays in the clear") {
    JointPmf pmf = dsbs01();
    PortionLayout l = small_layout();
    CipherSplit split = CipherSplit::half_of(l);
    for (int id = 1; id <= 5; ++id) {
        CipherCase c = CipherCase::from_id(id);
        KeySchedule keys =
            build_keys(c, l, split, 0.6, KeyVariant::long_key, pmf, 5);
        LinearEncoder enc(l, 5);
        CodewordBundle b = enc.encode({3, 5, 6});
        CipherBundle ct = encrypt(b, l, split, keys, c);
        Component key_comp =
            c.key_portion() == Portion::v_cx ? Component::cx : Component::cy;
        for (const auto& comp : ct.w_x)
            if (comp.component == key_comp) {
                CHECK(!comp.masked);
                CHECK(comp.value == b.v_cx);
            }
        for (const auto& comp : ct.w_y)
            if (comp.component == key_comp) {
                CHECK(!comp.masked);
                CHECK(comp.value == b.v_cy);
            }
    }
}

// with a fresh full-width uniform key on every component (key-role portion
// included), the wiretap view is an exact one-time pad: zero leakage
TEST_CASE("perfect secrecy with independent keys") {
    JointPmf pmf = dsbs01();
    PortionLayout l = small_layout();
    CipherSplit split = CipherSplit::half_of(l);
    const int k = 3;
    for (int id = 1; id <= 5; ++id) {
        CipherCase c = CipherCase::from_id(id);
        KeySchedule keys = build_keys(c, l, split, 0.5, KeyVariant::long_key,
                                      pmf, 11, /*independent_keys=*/true);
        LinearEncoder enc(l, 11);
        SecurityReport rep =
            measure_security(pmf, k, enc, keys, c, WiretapView::for_case(c));
        CHECK(rep.h_x_measured == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.h_y_measured == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.h_xy_measured ==
              doctest::Approx(entropy(pmf, {0, 1}).bits).epsilon(1e-9));
    }
}

TEST_CASE("composite equals long when the common word covers every component") {
    // all masked widths are <= the key-role width here, so the composite
    // schedule needs no supplements and both variants derive the same words
    JointPmf pmf = dsbs01();
    PortionLayout l = small_layout();
    CipherSplit split = CipherSplit::half_of(l);
    for (int id = 1; id <= 5; ++id) {
        CipherCase c = CipherCase::from_id(id);
        // long key of width ceil(3 * 2/3) = 2 = the key-role portion width
        KeySchedule lk =
            build_keys(c, l, split, 2.0 / 3.0, KeyVariant::long_key, pmf, 9);
        KeySchedule ck =
            build_keys(c, l, split, 2.0 / 3.0, KeyVariant::composite, pmf, 9);
        REQUIRE(lk.common_width == ck.common_width);
        REQUIRE(lk.total_random_bits == ck.total_random_bits);
        LinearEncoder enc(l, 9);
        SecurityReport a =
            measure_security(pmf, 3, enc, lk, c, WiretapView::for_case(c));
        SecurityReport b =
            measure_security(pmf, 3, enc, ck, c, WiretapView::for_case(c));
        CHECK(a.h_x_measured == b.h_x_measured);
        CHECK(a.h_y_measured == b.h_y_measured);
        CHECK(a.h_xy_measured == b.h_xy_measured);
    }
}

TEST_CASE("zero target disables masking") {
    JointPmf pmf = dsbs01();
    PortionLayout l = small_layout();
    CipherSplit split = CipherSplit::half_of(l);
    CipherCase c = CipherCase::from_id(1);
    KeySchedule keys = build_keys(c, l, split, 0.0, KeyVariant::long_key, pmf, 3);
    LinearEncoder enc(l, 3);
    CodewordBundle b = enc.encode({3, 2, 3});
    CipherBundle ct = encrypt(b, l, split, keys, c);
    for (const auto& comp : ct.w_x) CHECK(!comp.masked);
    CodewordBundle back = decrypt(ct, l, split, keys, c);
    CHECK(back.v_x == b.v_x);
}

TEST_CASE("region membership: slepian-wolf face") {
    JointPmf pmf = dsbs01();
    CipherCase c = CipherCase::from_id(1);
    double hxy = entropy(pmf, {0, 1}).bits;
    double hx_y = conditional_entropy(pmf, {0}, {1}).bits;
    double hy_x = conditional_entropy(pmf, {1}, {0}).bits;
    RatePoint corner{hx_y, hxy - hx_y, hxy, hxy, 0, 0, hxy};
    CHECK(region_member(corner, c, pmf).member);  // boundary inclusive
    RatePoint low = corner;
    low.r_x = hx_y - 0.01;
    auto r = region_member(low, c, pmf);
    CHECK(!r.member);
    REQUIRE(!r.violations.empty());
    CHECK(r.violations[0] == "R_X");
    RatePoint sum = corner;
    sum.r_x = hx_y + 0.01;
    sum.r_y = hy_x + 0.01;  // both above the per-source faces, below the sum
    if (sum.r_x + sum.r_y < hxy) CHECK(!region_member(sum, c, pmf).member);
}

TEST_CASE("region monotonicity") {
    JointPmf pmf = make_dsbs(0.25);
    for (int id = 1; id <= 5; ++id) {
        CipherCase c = CipherCase::from_id(id);
        RatePoint p{1.0, 1.0, 1.2, 1.2, 0.4, 0.4, 0.8};
        if (region_member(p, c, pmf).member) {
            RatePoint q = p;
            q.r_x += 0.3;
            q.r_ky += 0.5;
            CHECK(region_member(q, c, pmf).member);
        }
    }
}

TEST_CASE("case 4 equals case 3 with h_x = 0") {
    JointPmf pmf = dsbs01();
    CipherCase c3 = CipherCase::from_id(3);
    CipherCase c4 = CipherCase::from_id(4);
    int mismatches = 0;
    int n = 0;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            for (int kx = 0; kx < 6; ++kx)
                for (int ky = 0; ky < 5; ++ky) {
                    RatePoint p;
                    p.r_x = 0.4 * a;
                    p.r_y = 0.4 * b;
                    p.r_kx = 0.3 * kx;
                    p.r_ky = 0.3 * ky;
                    p.h_y = 0.5;
                    p.h_x = 0.0;  // the substitution that collapses case 3 to case 4
                    bool m3 = region_member(p, c3, pmf).member;
                    bool m4 = region_member(p, c4, pmf).member;
                    if (m3 != m4) ++mismatches;
                    ++n;
                }
    CHECK(n >= 1000);
    CHECK(mismatches == 0);
}

TEST_CASE("converse slack") {
    SecurityReport rep;
    rep.h_x_measured = 0.5;
    rep.h_y_measured = 0.4;
    rep.h_xy_measured = 0.8;
    RatePoint p;
    p.r_kx = 0.9;
    p.r_ky = 0.8;
    auto gaps1 = converse_gap(p, CipherCase::from_id(1), rep);
    REQUIRE(gaps1.size() == 2);
    CHECK(gaps1[0].slack_bits == doctest::Approx(0.1));
    CHECK(gaps1[1].slack_bits == doctest::Approx(0.0));
    auto gaps2 = converse_gap(p, CipherCase::from_id(2), rep);
    REQUIRE(gaps2.size() == 1);
    CHECK(gaps2[0].constraint == "R_kX-h_X");
    CHECK(gaps2[0].slack_bits == doctest::Approx(0.4));
}

TEST_CASE("split rejects out-of-range sub-blocks") {
    PortionLayout l = small_layout();
    CipherSplit bad{5, 0};
    KeySchedule keys;
    CHECK_THROWS_AS(encrypt({}, l, bad, keys, CipherCase::from_id(1)),
                    domain_error);
}
