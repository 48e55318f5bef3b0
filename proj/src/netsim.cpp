#include "cswlab/netsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace cswlab {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

std::uint64_t low_mask64(int bits) {
    return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

void require_binary(const JointPmf& pmf, const char* who) {
    for (int a : pmf.alphabet_sizes())
        if (a != 2) throw domain_error(std::string(who) + ": binary sources only");
}

}  // namespace

int SourceLayout::total_width() const {
    int w = m_private;
    for (auto& [term, bits] : common_shares) w += bits;
    return w;
}

MultiLayout allocate_portions(const MultiSourceConfig& cfg) {
    const JointPmf& pmf = cfg.pmf;
    require_binary(pmf, "allocate_portions");
    const int n = pmf.num_sources();
    if (n > 4) throw domain_error("allocate_portions: n > 4");
    if (cfg.k < 1) throw domain_error("allocate_portions: k < 1");
    MultiLayout out;
    out.per_source.resize(n);

    for (int i = 0; i < n; ++i) {
        SourceSubset self{i};
        out.per_source[i].m_private = round_half_up(
            cfg.k * conditional_entropy(pmf, self, self.complement(n)).bits);
    }

    for (int t = 2; t <= n; ++t) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (std::popcount(mask) != t) continue;
            SourceSubset sub;
            for (int s = 0; s < n; ++s)
                if (mask & (1u << s)) sub.members.push_back(s);
            CommonTerm term;
            term.subset = sub;
            term.value_bits =
                conditional_mutual_information(pmf, sub, sub.complement(n)).bits;
            term.width = round_half_up(cfg.k * term.value_bits);
            if (term.width < 0)
                throw domain_error("allocate_portions: negative common width for " +
                                   std::to_string(mask));
            if (term.width == 0 && term.value_bits <= 1e-12 &&
                term.value_bits >= -1e-12) {
                term.shares.assign(sub.members.size(), 0);
            } else {
                // split by weight (equal by default), round-half-up in member
                // order, last member takes the remainder
                double wsum = 0.0;
                std::vector<double> w(sub.members.size(), 1.0);
                if (!cfg.share_weights.empty())
                    for (std::size_t m = 0; m < sub.members.size(); ++m)
                        w[m] = cfg.share_weights[sub.members[m]];
                for (double v : w) wsum += v;
                int assigned = 0;
                term.shares.resize(sub.members.size());
                for (std::size_t m = 0; m + 1 < sub.members.size(); ++m) {
                    int s = std::clamp(round_half_up(term.width * w[m] / wsum), 0,
                                       term.width - assigned);
                    term.shares[m] = s;
                    assigned += s;
                }
                term.shares.back() = term.width - assigned;
            }
            int tidx = static_cast<int>(out.terms.size());
            for (std::size_t m = 0; m < sub.members.size(); ++m)
                out.per_source[sub.members[m]].common_shares.push_back(
                    {tidx, term.shares[m]});
            out.terms.push_back(std::move(term));
        }
    }
    return out;
}

MultiEncoder::MultiEncoder(const MultiLayout& layout, int k, std::uint64_t seed)
    : layout_(layout), k_(k) {
    const int n = static_cast<int>(layout.per_source.size());
    private_maps_.resize(n);
    share_maps_.resize(n);
    std::mt19937_64 rng(seed);
    const std::uint32_t kmask = (k == 32) ? ~0u : ((1u << k) - 1u);
    for (int i = 0; i < n; ++i) {
        const SourceLayout& sl = layout.per_source[i];
        int total = sl.total_width();
        if (total > k)
            throw domain_error("MultiEncoder: stacked rows exceed K for source " +
                               std::to_string(i));
        Gf2Matrix stacked{total, k, {}};
        do {
            stacked.row_masks.clear();
            for (int r = 0; r < total; ++r)
                stacked.row_masks.push_back(static_cast<std::uint32_t>(rng()) & kmask);
        } while (!stacked.full_row_rank());
        auto it = stacked.row_masks.begin();
        private_maps_[i] = {sl.m_private, k, {it, it + sl.m_private}};
        it += sl.m_private;
        for (auto& [term, bits] : sl.common_shares) {
            share_maps_[i].push_back({bits, k, {it, it + bits}});
            it += bits;
        }
    }
}

std::uint32_t MultiEncoder::private_word(int i, std::uint32_t bits) const {
    return private_maps_[i].apply(bits);
}

std::uint32_t MultiEncoder::common_word(int i, int term, std::uint32_t bits) const {
    const SourceLayout& sl = layout_.per_source[i];
    for (std::size_t m = 0; m < sl.common_shares.size(); ++m)
        if (sl.common_shares[m].first == term)
            return share_maps_[i][m].apply(bits);
    throw domain_error("MultiEncoder: source does not produce this term");
}

MaskPlan plan_masks(const MultiSourceConfig& cfg, const MultiLayout& layout,
                    bool combination) {
    const int n = static_cast<int>(layout.per_source.size());
    MaskPlan plan;
    for (int i = 0; i < n; ++i) {
        const SourceLayout& sl = layout.per_source[i];
        if (sl.m_private == 0) continue;
        // candidate mask words: source i's own common shares. A share used
        // as a pad is withheld from link i, so it must be recoverable from
        // the other producers; prefer terms with a secure-link co-producer.
        std::vector<std::pair<int, int>> candidates;
        for (int t = 0; t < static_cast<int>(layout.terms.size()); ++t) {
            const CommonTerm& term = layout.terms[t];
            if (!term.subset.contains(i)) continue;
            auto pos = std::find(term.subset.members.begin(),
                                 term.subset.members.end(), i) -
                       term.subset.members.begin();
            if (term.shares[pos] > 0) candidates.push_back({t, i});
        }
        auto has_secure_coproducer = [&](int t) {
            for (int m : layout.terms[t].subset.members)
                if (m != i && m < static_cast<int>(cfg.secure_link.size()) &&
                    cfg.secure_link[m])
                    return true;
            return false;
        };
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](const auto& a, const auto& b) {
                             return has_secure_coproducer(a.first) >
                                    has_secure_coproducer(b.first);
                         });
        if (candidates.empty()) continue;
        auto share_width = [&](const std::pair<int, int>& cand) {
            const CommonTerm& term = layout.terms[cand.first];
            const auto& mem = term.subset.members;
            auto pos = std::find(mem.begin(), mem.end(), cand.second);
            return term.shares[pos - mem.begin()];
        };
        MaskEntry e;
        e.target_source = i;
        e.mask_words.push_back(candidates[0]);
        int width = share_width(candidates[0]);
        if (combination && candidates.size() > 1) {
            e.mask_words.push_back(candidates[1]);
            width = std::min(width, share_width(candidates[1]));
        }
        e.segment_width = std::min(width, sl.m_private);
        if (e.segment_width > 0) plan.entries.push_back(std::move(e));
    }
    return plan;
}

std::vector<std::uint32_t> apply_masks(const MaskPlan& plan,
                                       const MultiEncoder& enc,
                                       const std::vector<std::uint32_t>& bits) {
    const int n = static_cast<int>(enc.layout().per_source.size());
    std::vector<std::uint32_t> priv(n);
    for (int i = 0; i < n; ++i) priv[i] = enc.private_word(i, bits[i]);
    for (const MaskEntry& e : plan.entries) {
        if (e.target_source < 0 || e.target_source >= n)
            throw domain_error("apply_masks: bad target source");
        if (e.segment_width == 0) continue;  // no-op
        std::uint32_t mask_word = 0;
        for (auto& [term, producer] : e.mask_words)
            mask_word ^= enc.common_word(producer, term, bits[producer]);
        std::uint32_t seg = static_cast<std::uint32_t>(low_mask64(e.segment_width));
        priv[e.target_source] ^= mask_word & seg;
    }
    return priv;
}

MaskedRateBound masked_rate_bound(const MultiSourceConfig& cfg) {
    const JointPmf& pmf = cfg.pmf;
    const int n = pmf.num_sources();
    if (n > 4) throw domain_error("masked_rate_bound: n > 4");
    SourceSubset all;
    for (int i = 0; i < n; ++i) all.members.push_back(i);
    MaskedRateBound out;
    out.sw_sum_rate_bits = entropy(pmf, all).bits;
    double savings = 0.0;
    for (int t = 2; t <= n; ++t) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (std::popcount(mask) != t) continue;
            SourceSubset sub;
            for (int s = 0; s < n; ++s)
                if (mask & (1u << s)) sub.members.push_back(s);
            savings += (t - 1) *
                       conditional_mutual_information(pmf, sub, sub.complement(n)).bits;
        }
    }
    out.bound_bits = out.sw_sum_rate_bits - savings;
    return out;
}

RegionResult region_member_multi(const MultiRatePoint& p, int case_id,
                                 const MultiSourceConfig& cfg) {
    const JointPmf& pmf = cfg.pmf;
    const int n = pmf.num_sources();
    RegionResult r;
    auto check = [&](bool ok, const char* name) {
        if (!ok) r.violations.push_back(name);
    };
    if (case_id == 1) {
        double key_term;
        if (p.term_subset >= 0) {
            SourceSubset sub;
            for (int s = 0; s < n; ++s)
                if (p.term_subset & (1 << s)) sub.members.push_back(s);
            key_term =
                conditional_mutual_information(pmf, sub, sub.complement(n)).bits;
        } else {
            SourceSubset sub{p.i, n - 1};
            if (p.i == n - 1) sub = SourceSubset{p.i, 0};
            key_term =
                conditional_mutual_information(pmf, sub, sub.complement(n)).bits;
        }
        check(p.r_i >= entropy(pmf, {p.i}).bits, "R_i");
        check(p.r_ki >= key_term, "R_ki");
    } else if (case_id == 2) {
        double h_ij = entropy(pmf, SourceSubset{p.i, p.j}).bits;
        double i_ij =
            conditional_mutual_information(pmf, SourceSubset{p.i, p.j}, {}).bits;
        check(p.r_i >= h_ij, "R_i");
        check(p.r_j >= h_ij, "R_j");
        check(p.r_ki >= i_ij, "R_ki");
        check(p.r_kj >= i_ij, "R_kj");
    } else {
        throw domain_error("region_member_multi: unknown case");
    }
    r.member = r.violations.empty();
    return r;
}

namespace {

bool is_withheld(const MaskPlan& plan, int link, int term) {
    for (const MaskEntry& e : plan.entries)
        if (e.target_source == link)
            for (auto& [t, producer] : e.mask_words)
                if (t == term && producer == link) return true;
    return false;
}

// observation = concatenated transmitted words of tapped links plus any
// separately revealed raw mask words. Shares consumed as pads are withheld
// from their link's transmission (that withholding is the rate saving).
ObservationMap network_view(const MultiSourceConfig& cfg, const MultiEncoder& enc,
                            const MaskPlan& plan,
                            const std::vector<int>& tapped,
                            const std::vector<std::pair<int, int>>& revealed) {
    ObservationMap m;
    m.key_width = 0;
    int width = 0;
    for (int link : tapped) {
        const SourceLayout& sl = enc.layout().per_source[link];
        width += sl.m_private;
        for (auto& [term, bits] : sl.common_shares)
            if (!is_withheld(plan, link, term)) width += bits;
    }
    for (auto& [term, producer] : revealed) {
        const CommonTerm& ct = enc.layout().terms[term];
        const auto& mem = ct.subset.members;
        width += ct.shares[std::find(mem.begin(), mem.end(), producer) - mem.begin()];
    }
    m.obs_width = width;
    m.view = [&enc, plan, tapped, revealed](const std::vector<std::uint32_t>& words,
                                            std::uint64_t) -> std::uint64_t {
        auto priv = apply_masks(plan, enc, words);
        std::uint64_t out = 0;
        int shift = 0;
        for (int link : tapped) {
            const SourceLayout& sl = enc.layout().per_source[link];
            out |= static_cast<std::uint64_t>(priv[link]) << shift;
            shift += sl.m_private;
            for (auto& [term, bits] : sl.common_shares) {
                if (bits == 0 || is_withheld(plan, link, term)) continue;
                out |= static_cast<std::uint64_t>(
                           enc.common_word(link, term, words[link]))
                       << shift;
                shift += bits;
            }
        }
        for (auto& [term, producer] : revealed) {
            const CommonTerm& ct = enc.layout().terms[term];
            const auto& mem = ct.subset.members;
            int bits = ct.shares[std::find(mem.begin(), mem.end(), producer) -
                                 mem.begin()];
            if (bits == 0) continue;
            out |= static_cast<std::uint64_t>(
                       enc.common_word(producer, term, words[producer]))
                   << shift;
            shift += bits;
        }
        return out;
    };
    return m;
}

}  // namespace

std::vector<SourceLeakage> simulate_network(
    const MultiSourceConfig& cfg, const MultiEncoder& enc, const MaskPlan& plan,
    const std::vector<int>& tapped_links,
    const std::vector<std::pair<int, int>>& revealed_mask_words) {
    const int n = cfg.pmf.num_sources();
    std::vector<SourceLeakage> out;
    if (tapped_links.empty() && revealed_mask_words.empty()) {
        for (int i = 0; i < n; ++i) out.push_back({i, 0.0, 0});
        return out;
    }
    ObservationMap view =
        network_view(cfg, enc, plan, tapped_links, revealed_mask_words);
    for (int i = 0; i < n; ++i) {
        auto mi = exact_mutual_information(cfg.pmf, cfg.k, view, SourceSubset{i});
        out.push_back({i, mi.h_bits, mi.enumeration_size});
    }
    return out;
}

LeakageReport multi_source_leakage(const MultiSourceConfig& cfg,
                                   const MultiEncoder& enc, int i, int j) {
    const int n = cfg.pmf.num_sources();
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw domain_error("multi_source_leakage: bad source index");
    MaskPlan empty;
    ObservationMap view = network_view(cfg, enc, empty, {j}, {});
    auto mi = exact_mutual_information(cfg.pmf, cfg.k, view, SourceSubset{i});
    LeakageReport r;
    r.k = cfg.k;
    r.scenario.target = SourceSubset{i};
    r.measured_bits = mi.h_bits;
    r.enumeration_size = mi.enumeration_size;
    r.satisfied = true;
    return r;
}

}  // namespace cswlab
