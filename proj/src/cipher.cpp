#include "cswlab/cipher.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace cswlab {

namespace {

std::uint64_t low_mask(int bits) {
    return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

constexpr std::array<Component, 6> kOrder = {Component::x1, Component::x2,
                                             Component::cx, Component::y1,
                                             Component::y2, Component::cy};

std::array<int, 6> component_widths(const PortionLayout& layout,
                                    const CipherSplit& split) {
    if (split.m_x1 < 0 || split.m_x1 > layout.m_vx || split.m_y1 < 0 ||
        split.m_y1 > layout.m_vy)
        throw domain_error("CipherSplit: sub-block width out of range");
    return {split.m_x1, layout.m_vx - split.m_x1, layout.m_cx,
            split.m_y1, layout.m_vy - split.m_y1, layout.m_cy};
}

Component key_component(const CipherCase& c) {
    return c.key_portion() == Portion::v_cx ? Component::cx : Component::cy;
}

// The key-role common portion travels in the clear in the paper's
// construction; the independent-keys mode pads every component instead so
// the wiretap view is a full one-time pad.
std::vector<Component> masked_components(const CipherCase& c, bool independent) {
    std::vector<Component> out;
    for (Component comp : kOrder)
        if (independent || comp != key_component(c)) out.push_back(comp);
    return out;
}

int component_index(Component c) {
    for (int i = 0; i < 6; ++i)
        if (kOrder[i] == c) return i;
    return -1;
}

// Per-component key values from the raw uniform bits. Shared between the
// drawn schedule and the oracle's key enumeration so both see the same map.
std::vector<KeyWord> derive_words(const KeySchedule& sched,
                                  const std::vector<Component>& masked,
                                  const std::array<int, 6>& widths,
                                  std::uint64_t raw) {
    std::vector<KeyWord> out;
    if (sched.total_random_bits == 0) return out;
    if (sched.independent_keys) {
        int off = 0;
        for (Component comp : masked) {
            int w = widths[component_index(comp)];
            out.push_back({comp, w, (raw >> off) & low_mask(w),
                           KeyProvenance::random});
            off += w;
        }
        return out;
    }
    std::uint64_t common = raw & low_mask(sched.common_width);
    if (sched.variant == KeyVariant::long_key) {
        for (Component comp : masked) {
            int w = widths[component_index(comp)];
            out.push_back({comp, w, common & low_mask(w),
                           KeyProvenance::reused_common});
        }
        return out;
    }
    // composite: common word plus a short supplement filling each component
    int off = sched.common_width;
    for (Component comp : masked) {
        int w = widths[component_index(comp)];
        int supp = std::max(0, w - sched.common_width);
        std::uint64_t v = common & low_mask(w);
        if (supp > 0) {
            v |= ((raw >> off) & low_mask(supp)) << sched.common_width;
            off += supp;
        }
        out.push_back({comp, w, v,
                       supp > 0 ? KeyProvenance::short_supplement
                                : KeyProvenance::reused_common});
    }
    return out;
}

double target_range_limit(const CipherCase& c, const JointPmf& pmf) {
    double hx = entropy(pmf, {0}).bits;
    double hy = entropy(pmf, {1}).bits;
    switch (c.id) {
        case 1: return entropy(pmf, {0, 1}).bits;
        case 2: return hx;
        case 3: return std::max(hx, hy);
        case 4: return hy;
        case 5: return hx;
    }
    throw domain_error("unknown cipher case");
}

}  // namespace

const char* component_name(Component c) {
    switch (c) {
        case Component::x1: return "w_x1";
        case Component::x2: return "w_x2";
        case Component::cx: return "w_cx";
        case Component::y1: return "w_y1";
        case Component::y2: return "w_y2";
        case Component::cy: return "w_cy";
    }
    return "?";
}

CipherCase CipherCase::from_id(int id) {
    switch (id) {
        case 1: return {1, true, true, true, true};
        case 2: return {2, true, true, true, false};
        case 3: return {3, true, false, true, true};
        case 4: return {4, true, false, false, true};
        case 5: return {5, true, false, true, false};
    }
    throw domain_error("CipherCase: id outside 1..5");
}

Portion CipherCase::key_portion() const {
    return id == 5 ? Portion::v_cx : Portion::v_cy;
}

CipherSplit CipherSplit::half_of(const PortionLayout& layout) {
    return {layout.m_vx / 2, layout.m_vy / 2};
}

WiretapView WiretapView::for_case(const CipherCase& c) {
    return {c.tx_leaked, c.ty_leaked};
}

KeySchedule build_keys(const CipherCase& c, const PortionLayout& layout,
                       const CipherSplit& split, double security_target,
                       KeyVariant variant, const JointPmf& pmf,
                       std::uint64_t seed, bool independent_keys) {
    if (security_target < 0.0 ||
        security_target > target_range_limit(c, pmf) + 1e-12)
        throw domain_error("build_keys: security target outside admissible range");
    auto widths = component_widths(layout, split);
    KeySchedule s;
    s.variant = variant;
    s.independent_keys = independent_keys;
    s.seed = seed;
    auto masked = masked_components(c, independent_keys);
    if (security_target == 0.0 && !independent_keys) {
        s.total_random_bits = 0;  // masking disabled
        return s;
    }
    if (independent_keys) {
        s.common_width = 0;
        s.total_random_bits = 0;
        for (Component comp : masked)
            s.total_random_bits += widths[component_index(comp)];
    } else if (variant == KeyVariant::long_key) {
        s.common_width = static_cast<int>(std::ceil(layout.k * security_target - 1e-12));
        s.total_random_bits = s.common_width;
    } else {
        // reuse the key-role common portion's width as the common key
        s.common_width = widths[component_index(key_component(c))];
        s.total_random_bits = s.common_width;
        for (Component comp : masked)
            s.total_random_bits +=
                std::max(0, widths[component_index(comp)] - s.common_width);
    }
    if (s.total_random_bits > 62)
        throw domain_error("build_keys: key material too wide");
    std::mt19937_64 rng(seed);
    std::uint64_t raw = rng() & low_mask(s.total_random_bits);
    s.common_value = raw & low_mask(s.common_width);
    s.words = derive_words(s, masked, widths, raw);
    return s;
}

namespace {

std::array<std::uint64_t, 6> plain_components(const CodewordBundle& bundle,
                                              const PortionLayout& layout,
                                              const CipherSplit& split) {
    auto sx = split_codeword(bundle.v_x, std::uint64_t{1} << split.m_x1);
    auto sy = split_codeword(bundle.v_y, std::uint64_t{1} << split.m_y1);
    (void)layout;
    return {sx.w1, sx.w2, bundle.v_cx, sy.w1, sy.w2, bundle.v_cy};
}

std::array<std::uint64_t, 6> apply_schedule(std::array<std::uint64_t, 6> vals,
                                            const KeySchedule& keys) {
    for (const KeyWord& w : keys.words)
        vals[component_index(w.component)] ^= w.value & low_mask(w.width);
    return vals;
}

}  // namespace

CipherBundle encrypt(const CodewordBundle& bundle, const PortionLayout& layout,
                     const CipherSplit& split, const KeySchedule& keys,
                     const CipherCase& c) {
    auto widths = component_widths(layout, split);
    auto vals = apply_schedule(plain_components(bundle, layout, split), keys);
    CipherBundle out;
    auto masked = masked_components(c, keys.independent_keys);
    auto is_masked = [&](Component comp) {
        if (keys.total_random_bits == 0) return false;
        for (Component m : masked)
            if (m == comp) return true;
        return false;
    };
    for (Component comp : {Component::x1, Component::x2, Component::cx})
        out.w_x.push_back({comp, widths[component_index(comp)],
                           vals[component_index(comp)], is_masked(comp)});
    for (Component comp : {Component::y1, Component::y2, Component::cy})
        out.w_y.push_back({comp, widths[component_index(comp)],
                           vals[component_index(comp)], is_masked(comp)});
    return out;
}

CodewordBundle decrypt(const CipherBundle& cipher, const PortionLayout& layout,
                       const CipherSplit& split, const KeySchedule& keys,
                       const CipherCase& c) {
    (void)c;
    std::array<std::uint64_t, 6> vals{};
    for (const auto& comp : cipher.w_x) vals[component_index(comp.component)] = comp.value;
    for (const auto& comp : cipher.w_y) vals[component_index(comp.component)] = comp.value;
    vals = apply_schedule(vals, keys);  // XOR is its own inverse
    CodewordBundle b;
    b.v_x = static_cast<std::uint32_t>(vals[0] | (vals[1] << split.m_x1));
    b.v_cx = static_cast<std::uint32_t>(vals[2]);
    b.v_y = static_cast<std::uint32_t>(vals[3] | (vals[4] << split.m_y1));
    b.v_cy = static_cast<std::uint32_t>(vals[5]);
    (void)layout;
    return b;
}

SecurityReport measure_security(const JointPmf& pmf, int k,
                                const LinearEncoder& enc, const KeySchedule& keys,
                                const CipherCase& c, const WiretapView& view) {
    const PortionLayout& layout = enc.layout();
    CipherSplit split = CipherSplit::half_of(layout);
    auto widths = component_widths(layout, split);
    auto masked = masked_components(c, keys.independent_keys);

    ObservationMap m;
    m.key_width = keys.total_random_bits;
    int obs_width = 0;
    if (view.w_x) obs_width += widths[0] + widths[1] + widths[2];
    if (view.w_y) obs_width += widths[3] + widths[4] + widths[5];
    m.obs_width = obs_width;
    m.view = [&pmf, &enc, keys, masked, widths, view, split,
              layout](const std::vector<std::uint32_t>& words,
                      std::uint64_t raw) -> std::uint64_t {
        SourceRealization r{layout.k, words[0], words[1]};
        CodewordBundle b = enc.encode(r);
        auto vals = plain_components(b, layout, split);
        KeySchedule derived = keys;
        derived.words = derive_words(keys, masked, widths, raw);
        vals = apply_schedule(vals, derived);
        std::uint64_t out = 0;
        int shift = 0;
        auto emit = [&](int idx) {
            out |= (vals[idx] & low_mask(widths[idx])) << shift;
            shift += widths[idx];
        };
        if (view.w_x) { emit(0); emit(1); emit(2); }
        if (view.w_y) { emit(3); emit(4); emit(5); }
        return out;
    };

    SecurityReport rep;
    auto hx = exact_conditional_entropy(pmf, k, m, SourceSubset{0});
    auto hy = exact_conditional_entropy(pmf, k, m, SourceSubset{1});
    auto hxy = exact_conditional_entropy(pmf, k, m, SourceSubset{0, 1});
    rep.h_x_measured = hx.h_bits / k;
    rep.h_y_measured = hy.h_bits / k;
    rep.h_xy_measured = hxy.h_bits / k;
    rep.enumeration_size = hx.enumeration_size + hy.enumeration_size +
                           hxy.enumeration_size;
    return rep;
}

RegionResult region_member(const RatePoint& p, const CipherCase& c,
                           const JointPmf& pmf) {
    if (pmf.num_sources() != 2)
        throw domain_error("region_member: two-source pmf required");
    double h_x_given_y = conditional_entropy(pmf, {0}, {1}).bits;
    double h_y_given_x = conditional_entropy(pmf, {1}, {0}).bits;
    double h_xy_joint = entropy(pmf, {0, 1}).bits;

    RegionResult r;
    auto check = [&](bool ok, const char* name) {
        if (!ok) r.violations.push_back(name);
    };
    check(p.r_x >= h_x_given_y, "R_X");
    check(p.r_y >= h_y_given_x, "R_Y");
    check(p.r_x + p.r_y >= h_xy_joint, "R_X+R_Y");
    switch (c.id) {
        case 1:
            check(p.r_kx >= p.h_xy, "R_kX");
            check(p.r_ky >= p.h_xy, "R_kY");
            break;
        case 2:
        case 3:
            check(p.r_kx >= p.h_x, "R_kX");
            check(p.r_ky >= p.h_y, "R_kY");
            break;
        case 4:  // same region as case 3 with the x target removed
            check(p.r_kx >= 0.0, "R_kX");
            check(p.r_ky >= p.h_y, "R_kY");
            break;
        case 5:
            check(p.r_kx >= p.h_x, "R_kX");
            check(p.r_ky >= 0.0, "R_kY");
            break;
        default:
            throw domain_error("region_member: unknown case");
    }
    r.member = r.violations.empty();
    return r;
}

std::vector<ConverseSlack> converse_gap(const RatePoint& point, const CipherCase& c,
                                        const SecurityReport& measured) {
    std::vector<ConverseSlack> out;
    auto push = [&](const char* name, double rate, double h) {
        out.push_back({name, rate - h});
    };
    switch (c.id) {
        case 1:
            push("R_kX-h_XY", point.r_kx, measured.h_xy_measured);
            push("R_kY-h_XY", point.r_ky, measured.h_xy_measured);
            break;
        case 2:
        case 5:
            push("R_kX-h_X", point.r_kx, measured.h_x_measured);
            break;
        case 3:
            push("R_kX-h_X", point.r_kx, measured.h_x_measured);
            push("R_kY-h_Y", point.r_ky, measured.h_y_measured);
            break;
        case 4:
            push("R_kY-h_Y", point.r_ky, measured.h_y_measured);
            break;
        default:
            break;
    }
    return out;
}

}  // namespace cswlab
