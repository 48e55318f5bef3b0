#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cswlab/cipher.hpp"
#include "cswlab/leakage.hpp"
#include "cswlab/oracle.hpp"
#include "cswlab/pmf.hpp"

namespace cswlab {

// n correlated binary sources, one link per source, one receiver.
struct MultiSourceConfig {
    JointPmf pmf;
    int k = 3;
    // Per-source allocation weight for splitting each common term among its
    // producers; empty means equal split.
    std::vector<double> share_weights;
    std::vector<bool> secure_link;  // defaults to all false
    std::uint64_t seed = 1;
};

// One complement-conditioned co-information term of the entropy
// decomposition, with its width split among the participating sources.
struct CommonTerm {
    SourceSubset subset;
    double value_bits = 0.0;   // per-symbol
    int width = 0;             // round-half-up of k * value
    std::vector<int> shares;   // per subset member, sums to width
};

struct SourceLayout {
    int m_private = 0;
    // (term index, bits produced by this source)
    std::vector<std::pair<int, int>> common_shares;
    int total_width() const;
};

struct MultiLayout {
    std::vector<CommonTerm> terms;
    std::vector<SourceLayout> per_source;
};

MultiLayout allocate_portions(const MultiSourceConfig& cfg);

// Seeded linear syndrome maps realizing a MultiLayout; each source's
// stacked matrix is full row rank.
class MultiEncoder {
public:
    MultiEncoder(const MultiLayout& layout, int k, std::uint64_t seed);

    const MultiLayout& layout() const { return layout_; }
    int k() const { return k_; }

    // Private word of source i.
    std::uint32_t private_word(int i, std::uint32_t bits) const;
    // The share of common term `term` produced by source i.
    std::uint32_t common_word(int i, int term, std::uint32_t bits) const;

private:
    MultiLayout layout_;
    int k_ = 0;
    std::vector<Gf2Matrix> private_maps_;
    // index: (source, term) pairs in per_source order
    std::vector<std::vector<Gf2Matrix>> share_maps_;
};

// Which of the source's own common-share words pad a private segment; one
// word (single masking) or two distinct words (combination masking). A share
// spent as a pad is withheld from the link's transmission -- the term still
// reaches the decoder through its other producers, and the withheld width is
// the channel-rate saving.
struct MaskEntry {
    int target_source = -1;
    int segment_width = 0;
    // (term index, producer source); producer == target_source
    std::vector<std::pair<int, int>> mask_words;
};

struct MaskPlan {
    std::vector<MaskEntry> entries;
};

// Prefers pads from terms whose other producers sit on secure links, so the
// withheld common information still travels securely.
MaskPlan plan_masks(const MultiSourceConfig& cfg, const MultiLayout& layout,
                    bool combination);

// Masked private words, one per source (unmasked ones pass through).
std::vector<std::uint32_t> apply_masks(
    const MaskPlan& plan, const MultiEncoder& enc,
    const std::vector<std::uint32_t>& source_bits);

struct MaskedRateBound {
    double bound_bits = 0.0;        // R_i^M lower bound, per symbol
    double sw_sum_rate_bits = 0.0;  // unmasked Slepian-Wolf sum rate H(S_1..S_n)
};

MaskedRateBound masked_rate_bound(const MultiSourceConfig& cfg);

struct MultiRatePoint {
    int i = 0;
    int j = 1;
    double r_i = 0.0;
    double r_ki = 0.0;
    double r_j = 0.0;
    double r_kj = 0.0;
    double h_i = 0.0;
    double h_j = 0.0;
    // Which co-information term keys case 1; -1 selects I(S_i;S_last|rest).
    int term_subset = -1;
};

RegionResult region_member_multi(const MultiRatePoint& point, int case_id,
                                 const MultiSourceConfig& cfg);

struct SourceLeakage {
    int source = 0;
    double measured_bits = 0.0;
    std::uint64_t enumeration_size = 0;
};

// Observation of the tapped links' transmitted words (after masking), plus
// optionally the raw mask words the adversary has separately compromised.
std::vector<SourceLeakage> simulate_network(
    const MultiSourceConfig& cfg, const MultiEncoder& enc, const MaskPlan& plan,
    const std::vector<int>& tapped_links,
    const std::vector<std::pair<int, int>>& revealed_mask_words = {});

// Leakage of S_i from source j's transmitted syndrome words, unmasked.
LeakageReport multi_source_leakage(const MultiSourceConfig& cfg,
                                   const MultiEncoder& enc, int i, int j);

}  // namespace cswlab
