#include "cswlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cswlab {

namespace {

constexpr std::uint64_t kEnumBudget = std::uint64_t{1} << 28;

struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

void require_binary(const JointPmf& pmf, const char* who) {
    for (int a : pmf.alphabet_sizes())
        if (a != 2) throw domain_error(std::string(who) + ": binary sources only");
}

// prob of the symbol tuple encoded as one bit per source
std::vector<double> tuple_prob_table(const JointPmf& pmf) {
    const int n = pmf.num_sources();
    std::vector<double> t(std::size_t{1} << n);
    for (std::size_t bits = 0; bits < t.size(); ++bits) {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            idx += ((bits >> i) & 1u) * pmf.stride(i);
        t[bits] = pmf.prob_at(idx);
    }
    return t;
}

using JointMap = std::unordered_map<std::uint64_t, double>;

// Accumulates p(observation, target) over a range of sequence tuples.
void accumulate_range(const JointPmf& pmf, int k, const ObservationMap& obs,
                      const SourceSubset& target, std::uint64_t begin,
                      std::uint64_t end, JointMap& joint,
                      std::uint64_t& evaluated) {
    const int n = pmf.num_sources();
    const int target_bits = static_cast<int>(target.size()) * k;
    const std::uint64_t key_count = std::uint64_t{1} << obs.key_width;
    const double key_prob = 1.0 / static_cast<double>(key_count);
    const auto tp = tuple_prob_table(pmf);
    std::vector<std::uint32_t> words(n);
    const std::uint32_t kmask = (k == 32) ? ~0u : ((1u << k) - 1u);

    for (std::uint64_t c = begin; c < end; ++c) {
        double p = 1.0;
        for (int pos = 0; pos < k && p > 0.0; ++pos) {
            std::uint64_t bits = 0;
            for (int i = 0; i < n; ++i)
                bits |= ((c >> (static_cast<std::uint64_t>(i) * k + pos)) & 1u) << i;
            p *= tp[bits];
        }
        if (p <= 0.0) continue;
        for (int i = 0; i < n; ++i)
            words[i] = static_cast<std::uint32_t>(c >> (static_cast<std::uint64_t>(i) * k)) & kmask;
        std::uint64_t tkn = 0;
        for (std::size_t m = 0; m < target.members.size(); ++m)
            tkn |= static_cast<std::uint64_t>(words[target.members[m]])
                   << (m * static_cast<std::size_t>(k));
        const double pk = p * key_prob;
        for (std::uint64_t key = 0; key < key_count; ++key) {
            std::uint64_t o = obs.view(words, key);
            joint[(o << target_bits) | tkn] += pk;
            ++evaluated;
        }
    }
}

struct JointDistribution {
    JointMap joint;
    std::uint64_t evaluated = 0;
};

JointDistribution enumerate_joint(const JointPmf& pmf, int k,
                                  const ObservationMap& obs,
                                  const SourceSubset& target, bool parallel) {
    require_binary(pmf, "oracle");
    if (!target.empty()) target.validate(pmf.num_sources());
    if (k < 1 || k > 28) throw domain_error("oracle: k outside [1,28]");
    if (obs.key_width < 0 || obs.key_width > 28)
        throw resource_error("oracle: key width outside [0,28]");
    const int n = pmf.num_sources();
    const int total_bits = n * k;
    if (total_bits > 28 ||
        (std::uint64_t{1} << total_bits) > (kEnumBudget >> obs.key_width))
        throw resource_error("oracle: enumeration budget exceeded");
    const int target_bits = static_cast<int>(target.size()) * k;
    if (obs.obs_width + target_bits > 62)
        throw resource_error("oracle: joint token too wide");

    const std::uint64_t total = std::uint64_t{1} << total_bits;
    // Fixed chunking; merge order never depends on the thread count.
    const int chunks = total >= 64 ? 64 : 1;
    const std::uint64_t chunk_size = total / chunks;

    std::vector<JointDistribution> partial(chunks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int c = 0; c < chunks; ++c) {
        std::uint64_t b = c * chunk_size;
        std::uint64_t e = (c == chunks - 1) ? total : b + chunk_size;
        accumulate_range(pmf, k, obs, target, b, e, partial[c].joint,
                         partial[c].evaluated);
    }
    JointDistribution out;
    for (auto& part : partial) {
        out.evaluated += part.evaluated;
        for (auto& [key, p] : part.joint) out.joint[key] += p;
    }
    return out;
}

// H(T|O) = H(O,T) - H(O), summed over sorted tokens for reproducibility.
double conditional_entropy_of(const JointDistribution& d, int target_bits) {
    std::vector<std::pair<std::uint64_t, double>> items(d.joint.begin(),
                                                        d.joint.end());
    std::sort(items.begin(), items.end());
    CompensatedSum h_joint;
    for (auto& [key, p] : items)
        if (p > 0.0) h_joint.add(-p * std::log2(p));
    CompensatedSum h_obs;
    std::size_t i = 0;
    while (i < items.size()) {
        std::uint64_t o = items[i].first >> target_bits;
        double po = 0.0;
        while (i < items.size() && (items[i].first >> target_bits) == o)
            po += items[i++].second;
        if (po > 0.0) h_obs.add(-po * std::log2(po));
    }
    double h = h_joint.value() - h_obs.value();
    return h < 0.0 && h > -1e-9 ? 0.0 : h;
}

ExactEntropyResult conditional_entropy_impl(const JointPmf& pmf, int k,
                                            const ObservationMap& obs,
                                            const SourceSubset& target,
                                            bool parallel) {
    auto d = enumerate_joint(pmf, k, obs, target, parallel);
    const int target_bits = static_cast<int>(target.size()) * k;
    return {conditional_entropy_of(d, target_bits), d.evaluated};
}

}  // namespace

ObservationMap portion_view(const LinearEncoder& enc,
                            const std::vector<Portion>& observed) {
    ObservationMap m;
    m.key_width = 0;
    int width = 0;
    for (Portion p : observed) {
        switch (p) {
            case Portion::v_x: width += enc.layout().m_vx; break;
            case Portion::v_cx: width += enc.layout().m_cx; break;
            case Portion::v_cy: width += enc.layout().m_cy; break;
            case Portion::v_y: width += enc.layout().m_vy; break;
        }
    }
    m.obs_width = width;
    std::vector<Portion> order = observed;
    m.view = [enc, order](const std::vector<std::uint32_t>& words,
                          std::uint64_t) -> std::uint64_t {
        SourceRealization r{enc.layout().k, words[0], words[1]};
        CodewordBundle b = enc.encode(r);
        std::uint64_t out = 0;
        int shift = 0;
        for (Portion p : order) {
            switch (p) {
                case Portion::v_x:
                    out |= static_cast<std::uint64_t>(b.v_x) << shift;
                    shift += enc.layout().m_vx;
                    break;
                case Portion::v_cx:
                    out |= static_cast<std::uint64_t>(b.v_cx) << shift;
                    shift += enc.layout().m_cx;
                    break;
                case Portion::v_cy:
                    out |= static_cast<std::uint64_t>(b.v_cy) << shift;
                    shift += enc.layout().m_cy;
                    break;
                case Portion::v_y:
                    out |= static_cast<std::uint64_t>(b.v_y) << shift;
                    shift += enc.layout().m_vy;
                    break;
            }
        }
        return out;
    };
    return m;
}

ExactEntropyResult exact_conditional_entropy(const JointPmf& pmf, int k,
                                             const ObservationMap& obs,
                                             const SourceSubset& target) {
    return conditional_entropy_impl(pmf, k, obs, target, true);
}

ExactEntropyResult exact_conditional_entropy_serial(const JointPmf& pmf, int k,
                                                    const ObservationMap& obs,
                                                    const SourceSubset& target) {
    return conditional_entropy_impl(pmf, k, obs, target, false);
}

ExactEntropyResult exact_mutual_information(const JointPmf& pmf, int k,
                                            const ObservationMap& obs,
                                            const SourceSubset& target) {
    auto cond = exact_conditional_entropy(pmf, k, obs, target);
    double h_marg = entropy(pmf, target).bits * k;
    double mi = h_marg - cond.h_bits;
    if (mi < 0.0 && mi > -1e-9) mi = 0.0;
    return {mi, cond.enumeration_size};
}

double exact_observation_entropy(const JointPmf& pmf, int k,
                                 const ObservationMap& obs) {
    auto d = enumerate_joint(pmf, k, obs, SourceSubset{}, true);
    std::vector<std::pair<std::uint64_t, double>> items(d.joint.begin(),
                                                        d.joint.end());
    std::sort(items.begin(), items.end());
    CompensatedSum h;
    for (auto& [key, p] : items)
        if (p > 0.0) h.add(-p * std::log2(p));
    return h.value();
}

}  // namespace cswlab
