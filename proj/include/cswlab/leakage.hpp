#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cswlab/oracle.hpp"
#include "cswlab/pmf.hpp"
#include "cswlab/swcodec.hpp"

namespace cswlab {

struct WiretapScenario {
    std::vector<Portion> observed;
    SourceSubset target{0};

    std::string tag() const;
    // Parses tags like "vx_vy", "vcx_vcy", "vcx_vcy_vy", "vy_vcy".
    static WiretapScenario parse(const std::string& tag);
};

struct Tolerance {
    double delta_bits = 0.0;
    double delta1_bits = 0.0;

    Tolerance() = default;
    Tolerance(double delta, double delta1);
};

struct BoundInterval {
    std::optional<double> lower;
    std::optional<double> upper;
    bool has_closed_form = false;
};

// Entropies of the realized portion words, oracle-computed.
struct PortionEntropies {
    double h_vx = 0.0;
    double h_vcx = 0.0;
    double h_vcy = 0.0;
    double h_vy = 0.0;
    double h_xk = 0.0;  // K*H(X)
};

PortionEntropies measure_portion_entropies(const JointPmf& pmf, int k,
                                           const LinearEncoder& enc);

// The four wiretap cases carry closed-form bound intervals; any other
// observed set yields an interval flagged as having no bound.
BoundInterval bound_interval(const WiretapScenario& scenario,
                             const PortionEntropies& pe, const Tolerance& tol);

struct LeakageReport {
    WiretapScenario scenario;
    int k = 0;
    double measured_bits = 0.0;
    std::optional<double> lower_bound_bits;
    std::optional<double> upper_bound_bits;
    Tolerance slack_used;
    bool satisfied = false;
    // Smallest non-negative delta that makes both bound sides hold.
    double delta_star = 0.0;
    std::uint64_t enumeration_size = 0;
};

LeakageReport measure_leakage(const JointPmf& pmf, int k, const LinearEncoder& enc,
                              const WiretapScenario& scenario,
                              const Tolerance& tol = {});

std::string leakage_csv_header();
std::string leakage_csv_row(const LeakageReport& r);
std::string leakage_json(const LeakageReport& r);

}  // namespace cswlab
