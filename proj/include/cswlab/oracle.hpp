#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cswlab/pmf.hpp"
#include "cswlab/swcodec.hpp"

namespace cswlab {

// Deterministic function of the source sequences and an independent uniform
// key, producing an observation token of obs_width bits.
struct ObservationMap {
    int key_width = 0;
    int obs_width = 0;
    std::function<std::uint64_t(const std::vector<std::uint32_t>& source_words,
                                std::uint64_t key)>
        view;
};

struct ExactEntropyResult {
    double h_bits = 0.0;
    std::uint64_t enumeration_size = 0;
};

// Which syndrome portions an observer sees (two-source case).
enum class Portion { v_x, v_cx, v_cy, v_y };

ObservationMap portion_view(const LinearEncoder& enc,
                            const std::vector<Portion>& observed);

// H(target^K | observation), by full enumeration of sequence tuples and key
// values. Keys are uniform and independent of the sources. Enumeration is
// partitioned into fixed chunks and merged in chunk order, so the result is
// identical for any thread count.
ExactEntropyResult exact_conditional_entropy(const JointPmf& pmf, int k,
                                             const ObservationMap& obs,
                                             const SourceSubset& target);

// Single-threaded reference path; the parallel kernel is checked against it.
ExactEntropyResult exact_conditional_entropy_serial(const JointPmf& pmf, int k,
                                                    const ObservationMap& obs,
                                                    const SourceSubset& target);

// K*H(target) - H(target^K | observation) = I(target^K; observation).
ExactEntropyResult exact_mutual_information(const JointPmf& pmf, int k,
                                            const ObservationMap& obs,
                                            const SourceSubset& target);

// Entropy of the observation token itself, H(W).
double exact_observation_entropy(const JointPmf& pmf, int k,
                                 const ObservationMap& obs);

}  // namespace cswlab
