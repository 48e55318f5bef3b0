#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cswlab {

class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Ordered set of source indices. Complement is taken w.r.t. a pmf's
// source count.
struct SourceSubset {
    std::vector<int> members;

    SourceSubset() = default;
    SourceSubset(std::initializer_list<int> m) : members(m) {}
    explicit SourceSubset(std::vector<int> m) : members(std::move(m)) {}

    bool empty() const { return members.empty(); }
    std::size_t size() const { return members.size(); }
    bool contains(int i) const;
    SourceSubset complement(int num_sources) const;
    // Throws domain_error on duplicates, out-of-range indices or emptiness.
    void validate(int num_sources) const;
};

enum class InfoKind {
    entropy,
    conditional_entropy,
    mutual_information,
    conditional_multi_information,
};

struct InfoQuantity {
    double bits = 0.0;
    InfoKind kind = InfoKind::entropy;
};

// Exact probability table over an n-source finite product alphabet,
// stored dense in row-major order (last source index varies fastest).
class JointPmf {
public:
    JointPmf(std::vector<int> alphabet_sizes, std::vector<double> probs);

    int num_sources() const { return static_cast<int>(alphabet_sizes_.size()); }
    const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
    const std::vector<double>& probs() const { return probs_; }

    double prob(const std::vector<int>& symbols) const;
    double prob_at(std::size_t flat_index) const { return probs_[flat_index]; }
    std::size_t table_size() const { return probs_.size(); }
    std::size_t stride(int source) const { return strides_[source]; }

    // Exact marginal over the given subset, in the subset's member order.
    JointPmf marginal(const SourceSubset& subset) const;

    std::string to_json() const;
    static JointPmf from_json(const std::string& text);

private:
    std::vector<int> alphabet_sizes_;
    std::vector<double> probs_;
    std::vector<std::size_t> strides_;
};

// Doubly symmetric binary source: X uniform bit, Y = X xor Bern(p).
JointPmf make_dsbs(double p);
// Seeded random dense pmf over n binary sources (test workloads).
JointPmf make_random_pmf(int num_sources, std::uint64_t seed,
                         int alphabet_size = 2);

InfoQuantity entropy(const JointPmf& pmf, const SourceSubset& subset);
InfoQuantity conditional_entropy(const JointPmf& pmf, const SourceSubset& subset,
                                 const SourceSubset& given);

// Recursive co-information I(A_1;..;A_k|C) = I(A_1;..;A_{k-1}|C)
//                                          - I(A_1;..;A_{k-1}|A_k,C).
// Requires |subset| >= 2 and subset disjoint from given.
InfoQuantity conditional_mutual_information(const JointPmf& pmf,
                                            const SourceSubset& subset,
                                            const SourceSubset& given);

struct DecompositionTerm {
    std::string descriptor;
    InfoQuantity quantity;
};

// H(S_i) = H(S_i | rest) + sum over all subsets containing S_i of the
// complement-conditioned co-information of the subset. Signed sum of the
// returned terms reproduces entropy(pmf, {i}) exactly.
std::vector<DecompositionTerm> entropy_decomposition(const JointPmf& pmf, int i);

JointPmf empirical_pmf(const std::vector<std::vector<int>>& samples,
                       std::vector<int> alphabet_sizes);

// Binary entropy function, bits.
double binary_entropy(double p);

}  // namespace cswlab
