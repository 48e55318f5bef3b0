#include "cswlab/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cswlab {

namespace {

constexpr std::size_t kMaxTableSize = std::size_t{1} << 24;

// Neumaier compensated sum; keeps 1e-9 tolerances honest on big tables.
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

double clamp_entropy(double h) {
    if (h < 0.0) {
        if (h < -1e-9) return h;  // genuinely negative, surface it
        return 0.0;
    }
    return h;
}

double table_entropy(const std::vector<double>& table) {
    CompensatedSum s;
    for (double p : table)
        if (p > 0.0) s.add(-p * std::log2(p));
    return clamp_entropy(s.value());
}

}  // namespace

bool SourceSubset::contains(int i) const {
    return std::find(members.begin(), members.end(), i) != members.end();
}

SourceSubset SourceSubset::complement(int num_sources) const {
    SourceSubset c;
    for (int i = 0; i < num_sources; ++i)
        if (!contains(i)) c.members.push_back(i);
    return c;
}

void SourceSubset::validate(int num_sources) const {
    if (members.empty()) throw domain_error("SourceSubset: empty");
    std::set<int> seen;
    for (int i : members) {
        if (i < 0 || i >= num_sources)
            throw domain_error("SourceSubset: index " + std::to_string(i) +
                               " out of range");
        if (!seen.insert(i).second)
            throw domain_error("SourceSubset: duplicate index " + std::to_string(i));
    }
}

JointPmf::JointPmf(std::vector<int> alphabet_sizes, std::vector<double> probs)
    : alphabet_sizes_(std::move(alphabet_sizes)), probs_(std::move(probs)) {
    if (alphabet_sizes_.empty()) throw domain_error("JointPmf: no sources");
    std::size_t total = 1;
    for (int a : alphabet_sizes_) {
        if (a < 2) throw domain_error("JointPmf: alphabet size < 2");
        total *= static_cast<std::size_t>(a);
        if (total > kMaxTableSize) throw domain_error("JointPmf: table too large");
    }
    if (probs_.size() != total)
        throw domain_error("JointPmf: table length mismatch");
    CompensatedSum s;
    for (double p : probs_) {
        if (p < 0.0) throw domain_error("JointPmf: negative probability");
        s.add(p);
    }
    if (std::abs(s.value() - 1.0) > 1e-12)
        throw domain_error("JointPmf: probabilities do not sum to 1");
    strides_.assign(alphabet_sizes_.size(), 1);
    for (int i = num_sources() - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * static_cast<std::size_t>(alphabet_sizes_[i + 1]);
}

double JointPmf::prob(const std::vector<int>& symbols) const {
    if (symbols.size() != alphabet_sizes_.size())
        throw domain_error("JointPmf::prob: arity mismatch");
    std::size_t idx = 0;
    for (int i = 0; i < num_sources(); ++i) {
        if (symbols[i] < 0 || symbols[i] >= alphabet_sizes_[i])
            throw domain_error("JointPmf::prob: symbol out of alphabet");
        idx += static_cast<std::size_t>(symbols[i]) * strides_[i];
    }
    return probs_[idx];
}

JointPmf JointPmf::marginal(const SourceSubset& subset) const {
    subset.validate(num_sources());
    std::vector<int> sizes;
    sizes.reserve(subset.size());
    std::size_t msize = 1;
    for (int i : subset.members) {
        sizes.push_back(alphabet_sizes_[i]);
        msize *= static_cast<std::size_t>(alphabet_sizes_[i]);
    }
    std::vector<double> table(msize, 0.0);
    std::vector<int> sym(num_sources(), 0);
    for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
        std::size_t rem = idx;
        for (int i = 0; i < num_sources(); ++i) {
            sym[i] = static_cast<int>(rem / strides_[i]);
            rem %= strides_[i];
        }
        std::size_t midx = 0;
        for (int i : subset.members)
            midx = midx * static_cast<std::size_t>(alphabet_sizes_[i]) + sym[i];
        table[midx] += probs_[idx];
    }
    return JointPmf(std::move(sizes), std::move(table));
}

std::string JointPmf::to_json() const {
    nlohmann::json j;
    j["alphabet_sizes"] = alphabet_sizes_;
    j["probs"] = probs_;
    return j.dump();
}

JointPmf JointPmf::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    return JointPmf(j.at("alphabet_sizes").get<std::vector<int>>(),
                    j.at("probs").get<std::vector<double>>());
}

JointPmf make_dsbs(double p) {
    if (p < 0.0 || p > 1.0) throw domain_error("make_dsbs: p outside [0,1]");
    return JointPmf({2, 2}, {0.5 * (1.0 - p), 0.5 * p, 0.5 * p, 0.5 * (1.0 - p)});
}

JointPmf make_random_pmf(int num_sources, std::uint64_t seed, int alphabet_size) {
    if (num_sources < 1) throw domain_error("make_random_pmf: n < 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::size_t total = 1;
    for (int i = 0; i < num_sources; ++i) total *= static_cast<std::size_t>(alphabet_size);
    std::vector<double> table(total);
    double sum = 0.0;
    for (double& v : table) {
        v = unif(rng) + 1e-6;
        sum += v;
    }
    for (double& v : table) v /= sum;
    // absorb rounding residue into the largest cell
    double resid = 1.0;
    for (double v : table) resid -= v;
    *std::max_element(table.begin(), table.end()) += resid;
    return JointPmf(std::vector<int>(num_sources, alphabet_size), std::move(table));
}

InfoQuantity entropy(const JointPmf& pmf, const SourceSubset& subset) {
    subset.validate(pmf.num_sources());
    JointPmf m = pmf.marginal(subset);
    return {table_entropy(m.probs()), InfoKind::entropy};
}

InfoQuantity conditional_entropy(const JointPmf& pmf, const SourceSubset& subset,
                                 const SourceSubset& given) {
    subset.validate(pmf.num_sources());
    if (given.empty())
        return {entropy(pmf, subset).bits, InfoKind::conditional_entropy};
    given.validate(pmf.num_sources());
    for (int i : subset.members)
        if (given.contains(i))
            throw domain_error("conditional_entropy: subset overlaps given");
    SourceSubset joint = subset;
    joint.members.insert(joint.members.end(), given.members.begin(),
                         given.members.end());
    double h = entropy(pmf, joint).bits - entropy(pmf, given).bits;
    return {clamp_entropy(h), InfoKind::conditional_entropy};
}

namespace {

// Base case |members|=1 is H(A|C); each recursion step peels the last member.
double co_information(const JointPmf& pmf, const std::vector<int>& members,
                      const std::vector<int>& given) {
    if (members.size() == 1)
        return conditional_entropy(pmf, SourceSubset(members), SourceSubset(given)).bits;
    std::vector<int> head(members.begin(), members.end() - 1);
    std::vector<int> extended = given;
    extended.push_back(members.back());
    return co_information(pmf, head, given) - co_information(pmf, head, extended);
}

}  // namespace

InfoQuantity conditional_mutual_information(const JointPmf& pmf,
                                            const SourceSubset& subset,
                                            const SourceSubset& given) {
    subset.validate(pmf.num_sources());
    if (subset.size() < 2)
        throw domain_error("conditional_mutual_information: need >= 2 members");
    if (!given.empty()) {
        given.validate(pmf.num_sources());
        for (int i : subset.members)
            if (given.contains(i))
                throw domain_error("conditional_mutual_information: overlap");
    }
    double v = co_information(pmf, subset.members, given.members);
    InfoKind kind = subset.size() == 2 ? InfoKind::mutual_information
                                       : InfoKind::conditional_multi_information;
    if (subset.size() == 2 && v < 0.0 && v > -1e-9) v = 0.0;
    return {v, kind};
}

std::vector<DecompositionTerm> entropy_decomposition(const JointPmf& pmf, int i) {
    const int n = pmf.num_sources();
    if (i < 0 || i >= n) throw domain_error("entropy_decomposition: bad index");
    std::vector<DecompositionTerm> terms;

    SourceSubset self{i};
    SourceSubset rest = self.complement(n);
    {
        std::ostringstream d;
        d << "H(S" << i << "|rest)";
        terms.push_back({d.str(), conditional_entropy(pmf, self, rest)});
    }

    // Enumerate all subsets containing i with |subset| >= 2, by size.
    for (int t = 2; t <= n; ++t) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (!(mask & (1u << i))) continue;
            if (std::popcount(mask) != t) continue;
            SourceSubset sub;
            for (int s = 0; s < n; ++s)
                if (mask & (1u << s)) sub.members.push_back(s);
            SourceSubset comp = sub.complement(n);
            std::ostringstream d;
            d << "I(";
            for (std::size_t m = 0; m < sub.members.size(); ++m)
                d << (m ? ";S" : "S") << sub.members[m];
            if (!comp.empty()) {
                d << "|";
                for (std::size_t m = 0; m < comp.members.size(); ++m)
                    d << (m ? ",S" : "S") << comp.members[m];
            }
            d << ")";
            terms.push_back({d.str(), conditional_mutual_information(pmf, sub, comp)});
        }
    }
    return terms;
}

JointPmf empirical_pmf(const std::vector<std::vector<int>>& samples,
                       std::vector<int> alphabet_sizes) {
    if (samples.empty()) throw domain_error("empirical_pmf: no samples");
    std::size_t total = 1;
    for (int a : alphabet_sizes) total *= static_cast<std::size_t>(a);
    std::vector<std::size_t> counts(total, 0);
    std::vector<std::size_t> strides(alphabet_sizes.size(), 1);
    for (int i = static_cast<int>(alphabet_sizes.size()) - 2; i >= 0; --i)
        strides[i] = strides[i + 1] * static_cast<std::size_t>(alphabet_sizes[i + 1]);
    for (const auto& s : samples) {
        if (s.size() != alphabet_sizes.size())
            throw domain_error("empirical_pmf: sample arity mismatch");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] < 0 || s[i] >= alphabet_sizes[i])
                throw domain_error("empirical_pmf: symbol out of alphabet");
            idx += static_cast<std::size_t>(s[i]) * strides[i];
        }
        ++counts[idx];
    }
    std::vector<double> table(total);
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < total; ++i)
        table[i] = static_cast<double>(counts[i]) / n;
    return JointPmf(std::move(alphabet_sizes), std::move(table));
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace cswlab
