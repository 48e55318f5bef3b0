#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cswlab/oracle.hpp"
#include "cswlab/pmf.hpp"
#include "cswlab/swcodec.hpp"

namespace cswlab {

// The five wiretap/secrecy cases. T_X = (V_X, V_CX), T_Y = (V_Y, V_CY).
struct CipherCase {
    int id = 1;
    bool tx_leaked = true;
    bool ty_leaked = true;
    bool x_secret = true;
    bool y_secret = true;

    static CipherCase from_id(int id);
    // Which common portion plays the key role in the construction.
    Portion key_portion() const;
};

enum class KeyVariant { long_key, composite };

enum class KeyProvenance { reused_common, short_supplement, random };

// Codeword components in construction order.
enum class Component { x1, x2, cx, y1, y2, cy };
const char* component_name(Component c);

// How the private codewords split into sub-blocks (bit widths, so the
// moduli are powers of two and masking is an exact one-time pad).
struct CipherSplit {
    int m_x1 = 0;
    int m_y1 = 0;
    static CipherSplit half_of(const PortionLayout& layout);
};

struct KeyWord {
    Component component;
    int width = 0;
    std::uint64_t value = 0;
    KeyProvenance provenance = KeyProvenance::random;
};

struct KeySchedule {
    KeyVariant variant = KeyVariant::long_key;
    bool independent_keys = false;
    int common_width = 0;       // width of the reused common key word
    std::uint64_t common_value = 0;
    int total_random_bits = 0;  // raw uniform bits behind the schedule
    std::uint64_t seed = 0;
    std::vector<KeyWord> words;  // one per masked component
};

// Key sizing: the common key word carries
// ceil(K*security_target) bits (long variant) or the key-role portion's
// width plus per-component supplements (composite variant).
KeySchedule build_keys(const CipherCase& c, const PortionLayout& layout,
                       const CipherSplit& split, double security_target,
                       KeyVariant variant, const JointPmf& pmf,
                       std::uint64_t seed, bool independent_keys = false);

struct CipherComponent {
    Component component;
    int width = 0;
    std::uint64_t value = 0;
    bool masked = false;
};

struct CipherBundle {
    std::vector<CipherComponent> w_x;
    std::vector<CipherComponent> w_y;
};

CipherBundle encrypt(const CodewordBundle& bundle, const PortionLayout& layout,
                     const CipherSplit& split, const KeySchedule& keys,
                     const CipherCase& c);

CodewordBundle decrypt(const CipherBundle& cipher, const PortionLayout& layout,
                       const CipherSplit& split, const KeySchedule& keys,
                       const CipherCase& c);

struct SecurityReport {
    double h_x_measured = 0.0;   // (1/K) H(X^K | view)
    double h_y_measured = 0.0;
    double h_xy_measured = 0.0;
    std::uint64_t enumeration_size = 0;
};

struct WiretapView {
    bool w_x = true;
    bool w_y = true;
    static WiretapView for_case(const CipherCase& c);
};

SecurityReport measure_security(const JointPmf& pmf, int k,
                                const LinearEncoder& enc, const KeySchedule& keys,
                                const CipherCase& c, const WiretapView& view);

struct RatePoint {
    double r_x = 0.0;
    double r_y = 0.0;
    double r_kx = 0.0;
    double r_ky = 0.0;
    double h_x = 0.0;
    double h_y = 0.0;
    double h_xy = 0.0;
};

struct RegionResult {
    bool member = false;
    std::vector<std::string> violations;
};

// Rate-region inequality evaluation; boundary points are
// members (non-strict inequalities).
RegionResult region_member(const RatePoint& point, const CipherCase& c,
                           const JointPmf& pmf);

struct ConverseSlack {
    std::string constraint;
    double slack_bits = 0.0;  // key rate minus measured uncertainty
};

std::vector<ConverseSlack> converse_gap(const RatePoint& point, const CipherCase& c,
                                        const SecurityReport& measured);

}  // namespace cswlab
