#include "cswlab/swcodec.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <sstream>

namespace cswlab {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void require_two_binary_sources(const JointPmf& pmf, const char* who) {
    if (pmf.num_sources() != 2 || pmf.alphabet_sizes()[0] != 2 ||
        pmf.alphabet_sizes()[1] != 2)
        throw domain_error(std::string(who) + ": need a two-source binary pmf");
}

// Candidate words x with M x == s, via one particular solution plus the
// null-space basis. Empty when the syndrome is inconsistent.
std::vector<std::uint32_t> coset(const Gf2Matrix& m, std::uint32_t s, int k) {
    // Gaussian elimination on [rows | s-bits].
    std::vector<std::uint64_t> aug;  // low k bits: row mask, bit k: rhs
    aug.reserve(m.rows);
    for (int r = 0; r < m.rows; ++r)
        aug.push_back(static_cast<std::uint64_t>(m.row_masks[r]) |
                      (static_cast<std::uint64_t>((s >> r) & 1u) << k));
    std::vector<int> pivot_col;
    std::size_t row = 0;
    for (int col = 0; col < k && row < aug.size(); ++col) {
        std::size_t pr = row;
        while (pr < aug.size() && !((aug[pr] >> col) & 1)) ++pr;
        if (pr == aug.size()) continue;
        std::swap(aug[row], aug[pr]);
        for (std::size_t r2 = 0; r2 < aug.size(); ++r2)
            if (r2 != row && ((aug[r2] >> col) & 1)) aug[r2] ^= aug[row];
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r2 = row; r2 < aug.size(); ++r2)
        if ((aug[r2] >> k) & 1) return {};  // inconsistent
    std::uint32_t particular = 0;
    for (std::size_t r2 = 0; r2 < row; ++r2)
        if ((aug[r2] >> k) & 1) particular |= 1u << pivot_col[r2];
    std::vector<std::uint32_t> basis;
    std::uint32_t piv_mask = 0;
    for (int c : pivot_col) piv_mask |= 1u << c;
    for (int col = 0; col < k; ++col) {
        if (piv_mask & (1u << col)) continue;
        std::uint32_t v = 1u << col;
        for (std::size_t r2 = 0; r2 < row; ++r2)
            if ((aug[r2] >> col) & 1) v |= 1u << pivot_col[r2];
        basis.push_back(v);
    }
    std::vector<std::uint32_t> out;
    out.reserve(std::size_t{1} << basis.size());
    for (std::uint64_t m2 = 0; m2 < (std::uint64_t{1} << basis.size()); ++m2) {
        std::uint32_t v = particular;
        for (std::size_t b = 0; b < basis.size(); ++b)
            if ((m2 >> b) & 1) v ^= basis[b];
        out.push_back(v);
    }
    return out;
}

double sequence_pair_prob(const JointPmf& pmf, std::uint32_t x, std::uint32_t y,
                          int k) {
    double p = 1.0;
    for (int pos = 0; pos < k; ++pos) {
        std::size_t idx = ((x >> pos) & 1u) * pmf.stride(0) +
                          ((y >> pos) & 1u) * pmf.stride(1);
        p *= pmf.prob_at(idx);
    }
    return p;
}

}  // namespace

std::uint32_t Gf2Matrix::apply(std::uint32_t x) const {
    std::uint32_t out = 0;
    for (int r = 0; r < rows; ++r)
        out |= static_cast<std::uint32_t>(std::popcount(row_masks[r] & x) & 1) << r;
    return out;
}

int Gf2Matrix::rank() const {
    std::vector<std::uint32_t> rws = row_masks;
    int rank = 0;
    for (int col = 0; col < cols; ++col) {
        int pr = -1;
        for (std::size_t r = rank; r < rws.size(); ++r)
            if ((rws[r] >> col) & 1u) { pr = static_cast<int>(r); break; }
        if (pr < 0) continue;
        std::swap(rws[rank], rws[pr]);
        for (std::size_t r = 0; r < rws.size(); ++r)
            if (static_cast<int>(r) != rank && ((rws[r] >> col) & 1u))
                rws[r] ^= rws[rank];
        ++rank;
    }
    return rank;
}

std::string PortionLayout::to_string() const {
    std::ostringstream os;
    os << k << ":" << m_vx << "," << m_cx << "," << m_cy << "," << m_vy;
    return os.str();
}

PortionLayout PortionLayout::parse(const std::string& text) {
    PortionLayout l;
    char c1, c2, c3, c4;
    std::istringstream is(text);
    if (!(is >> l.k >> c1 >> l.m_vx >> c2 >> l.m_cx >> c3 >> l.m_cy >> c4 >> l.m_vy) ||
        c1 != ':' || c2 != ',' || c3 != ',' || c4 != ',')
        throw domain_error("PortionLayout::parse: expected K:m_vx,m_cx,m_cy,m_vy");
    if (l.k < 1 || l.m_vx < 0 || l.m_cx < 0 || l.m_cy < 0 || l.m_vy < 0)
        throw domain_error("PortionLayout::parse: negative field");
    int pool = l.m_cx + l.m_cy;
    l.alpha = pool > 0 ? static_cast<double>(l.m_cx) / pool : 0.5;
    return l;
}

PortionLayout build_layout(const JointPmf& pmf, int k, double alpha) {
    require_two_binary_sources(pmf, "build_layout");
    if (k < 2 || k > 16) throw domain_error("build_layout: k outside [2,16]");
    if (alpha < 0.0 || alpha > 1.0) throw domain_error("build_layout: alpha outside [0,1]");
    double h_x_given_y = conditional_entropy(pmf, {0}, {1}).bits;
    double h_y_given_x = conditional_entropy(pmf, {1}, {0}).bits;
    double i_xy = conditional_mutual_information(pmf, {0, 1}, {}).bits;
    PortionLayout l;
    l.k = k;
    l.alpha = alpha;
    l.m_vx = round_half_up(k * h_x_given_y);
    l.m_vy = round_half_up(k * h_y_given_x);
    int pool = round_half_up(k * i_xy);
    l.m_cx = round_half_up(alpha * pool);
    l.m_cy = pool - l.m_cx;
    return l;
}

LinearEncoder::LinearEncoder(const PortionLayout& layout, std::uint64_t seed)
    : layout_(layout), seed_(seed) {
    const int k = layout.k;
    if (k < 1 || k > 16) throw domain_error("LinearEncoder: k outside [1,16]");
    if (layout.rows_x() > k || layout.rows_y() > k)
        throw domain_error("LinearEncoder: stacked rows exceed K, no full-rank map");
    std::mt19937_64 rng(seed);
    auto draw_stacked = [&](int rows) {
        Gf2Matrix m;
        m.cols = k;
        m.rows = rows;
        const std::uint32_t mask = k == 32 ? ~0u : ((1u << k) - 1u);
        do {
            m.row_masks.clear();
            for (int r = 0; r < rows; ++r)
                m.row_masks.push_back(static_cast<std::uint32_t>(rng()) & mask);
        } while (!m.full_row_rank());
        return m;
    };
    Gf2Matrix sx = draw_stacked(layout.rows_x());
    Gf2Matrix sy = draw_stacked(layout.rows_y());
    // Submatrices of a full-row-rank stack are full row rank themselves.
    a_vx_ = {layout.m_vx, k, {sx.row_masks.begin(), sx.row_masks.begin() + layout.m_vx}};
    a_cx_ = {layout.m_cx, k, {sx.row_masks.begin() + layout.m_vx, sx.row_masks.end()}};
    b_vy_ = {layout.m_vy, k, {sy.row_masks.begin(), sy.row_masks.begin() + layout.m_vy}};
    b_cy_ = {layout.m_cy, k, {sy.row_masks.begin() + layout.m_vy, sy.row_masks.end()}};
}

CodewordBundle LinearEncoder::encode(const SourceRealization& real) const {
    if (real.k != layout_.k) throw domain_error("encode: realization width mismatch");
    return {a_vx_.apply(real.x_bits), a_cx_.apply(real.x_bits),
            b_cy_.apply(real.y_bits), b_vy_.apply(real.y_bits)};
}

DecodeResult decode(const LinearEncoder& enc, const CodewordBundle& bundle,
                    const JointPmf& pmf) {
    require_two_binary_sources(pmf, "decode");
    const int k = enc.layout().k;
    if (k > 12) throw domain_error("decode: K > 12 exceeds enumeration budget");

    Gf2Matrix stacked_x{enc.layout().rows_x(), k, {}};
    stacked_x.row_masks = enc.a_vx().row_masks;
    stacked_x.row_masks.insert(stacked_x.row_masks.end(),
                               enc.a_cx().row_masks.begin(), enc.a_cx().row_masks.end());
    std::uint32_t sx = bundle.v_x |
                       (bundle.v_cx << enc.layout().m_vx);
    Gf2Matrix stacked_y{enc.layout().rows_y(), k, {}};
    stacked_y.row_masks = enc.b_vy().row_masks;
    stacked_y.row_masks.insert(stacked_y.row_masks.end(),
                               enc.b_cy().row_masks.begin(), enc.b_cy().row_masks.end());
    std::uint32_t sy = bundle.v_y | (bundle.v_cy << enc.layout().m_vy);

    auto xs = coset(stacked_x, sx, k);
    auto ys = coset(stacked_y, sy, k);
    if (xs.empty() || ys.empty())
        throw std::logic_error("decode: no sequence consistent with syndromes");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    double best = -1.0;
    std::uint32_t bx = 0, by = 0;
    double total = 0.0;
    for (std::uint32_t x : xs) {
        for (std::uint32_t y : ys) {
            double p = sequence_pair_prob(pmf, x, y, k);
            total += p;
            if (p > best) {
                best = p;
                bx = x;
                by = y;
            }
        }
    }
    DecodeResult res;
    res.realization = {k, bx, by};
    res.posterior = total > 0.0 ? best / total : 0.0;
    return res;
}

ThreePortionResult decode_three_portion(const LinearEncoder& enc, std::uint32_t v_x,
                                        std::uint32_t v_cx, std::uint32_t v_cy,
                                        const JointPmf& pmf) {
    require_two_binary_sources(pmf, "decode_three_portion");
    const int k = enc.layout().k;
    if (k > 12) throw domain_error("decode_three_portion: K > 12");
    Gf2Matrix stacked_x{enc.layout().rows_x(), k, {}};
    stacked_x.row_masks = enc.a_vx().row_masks;
    stacked_x.row_masks.insert(stacked_x.row_masks.end(),
                               enc.a_cx().row_masks.begin(), enc.a_cx().row_masks.end());
    std::uint32_t sx = v_x | (v_cx << enc.layout().m_vx);
    auto xs = coset(stacked_x, sx, k);
    auto ys = coset(enc.b_cy(), v_cy, k);
    if (xs.empty() || ys.empty())
        throw std::logic_error("decode_three_portion: inconsistent syndromes");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double best = -1.0, total = 0.0;
    std::uint32_t bx = 0;
    for (std::uint32_t x : xs) {
        double px = 0.0;
        for (std::uint32_t y : ys) px += sequence_pair_prob(pmf, x, y, k);
        total += px;
        if (px > best) {
            best = px;
            bx = x;
        }
    }
    return {bx, total > 0.0 ? best / total : 0.0};
}

SplitCodeword split_codeword(std::uint64_t w, std::uint64_t m1) {
    if (m1 == 0) throw domain_error("split_codeword: m1 == 0");
    SplitCodeword s;
    s.m1 = m1;
    s.w1 = w % m1;
    s.w2 = (w - s.w1) / m1;
    return s;
}

std::string golden_record(const LinearEncoder& enc, const SourceRealization& real,
                          const CodewordBundle& bundle) {
    std::ostringstream os;
    os << enc.seed() << " " << enc.layout().to_string() << std::hex << " x="
       << real.x_bits << " y=" << real.y_bits << " vx=" << bundle.v_x
       << " vcx=" << bundle.v_cx << " vcy=" << bundle.v_cy << " vy=" << bundle.v_y;
    return os.str();
}

}  // namespace cswlab
