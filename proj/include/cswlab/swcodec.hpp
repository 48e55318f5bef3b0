#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cswlab/pmf.hpp"

namespace cswlab {

// K-bit source words; bit k is the symbol at position k.
struct SourceRealization {
    int k = 0;
    std::uint32_t x_bits = 0;
    std::uint32_t y_bits = 0;
};

// Row counts of the four syndrome portions plus the common-information
// allocation share produced by X.
struct PortionLayout {
    int k = 0;
    int m_vx = 0;
    int m_cx = 0;
    int m_cy = 0;
    int m_vy = 0;
    double alpha = 0.5;

    int rows_x() const { return m_vx + m_cx; }
    int rows_y() const { return m_vy + m_cy; }
    std::string to_string() const;
    // Parses "K:m_vx,m_cx,m_cy,m_vy" (the CLI --layout override format).
    static PortionLayout parse(const std::string& text);
};

// Nearest integers to the K-scaled rate targets, round-half-up; the common
// pool is split by rounding the X share first.
PortionLayout build_layout(const JointPmf& pmf, int k, double alpha);

struct CodewordBundle {
    std::uint32_t v_x = 0;
    std::uint32_t v_cx = 0;
    std::uint32_t v_cy = 0;
    std::uint32_t v_y = 0;
};

// GF(2) matrix with K-column rows stored as bitmasks.
struct Gf2Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint32_t> row_masks;

    std::uint32_t apply(std::uint32_t x) const;
    int rank() const;
    bool full_row_rank() const { return rank() == rows; }
};

// Seeded uniform random full-row-rank syndrome maps; the stacked per-source
// matrices [A_vx; A_cx] and [B_vy; B_cy] are full row rank as well.
class LinearEncoder {
public:
    LinearEncoder(const PortionLayout& layout, std::uint64_t seed);

    const PortionLayout& layout() const { return layout_; }
    std::uint64_t seed() const { return seed_; }
    const Gf2Matrix& a_vx() const { return a_vx_; }
    const Gf2Matrix& a_cx() const { return a_cx_; }
    const Gf2Matrix& b_cy() const { return b_cy_; }
    const Gf2Matrix& b_vy() const { return b_vy_; }

    CodewordBundle encode(const SourceRealization& real) const;

private:
    PortionLayout layout_;
    std::uint64_t seed_ = 0;
    Gf2Matrix a_vx_, a_cx_, b_cy_, b_vy_;
};

struct DecodeResult {
    SourceRealization realization;
    double posterior = 0.0;
};

// Exhaustive MAP decoding over all (x, y) consistent with all four portions.
// Ties break lexicographically on (x, y). Requires K <= 12.
DecodeResult decode(const LinearEncoder& enc, const CodewordBundle& bundle,
                    const JointPmf& pmf);

// MAP estimate of x from (V_X, V_CX, V_CY) only, marginalizing y.
struct ThreePortionResult {
    std::uint32_t x_bits = 0;
    double posterior = 0.0;
};
ThreePortionResult decode_three_portion(const LinearEncoder& enc,
                                        std::uint32_t v_x, std::uint32_t v_cx,
                                        std::uint32_t v_cy, const JointPmf& pmf);

struct SplitCodeword {
    std::uint64_t w1 = 0;
    std::uint64_t w2 = 0;
    std::uint64_t m1 = 1;
};

SplitCodeword split_codeword(std::uint64_t w, std::uint64_t m1);

// One line per record: seed K layout x y vx vcx vcy vy (hex words).
std::string golden_record(const LinearEncoder& enc, const SourceRealization& real,
                          const CodewordBundle& bundle);

}  // namespace cswlab
