#include "cswlab/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace cswlab {

namespace {

const char* portion_name(Portion p) {
    switch (p) {
        case Portion::v_x: return "vx";
        case Portion::v_cx: return "vcx";
        case Portion::v_cy: return "vcy";
        case Portion::v_y: return "vy";
    }
    return "?";
}

bool same_portions(const std::vector<Portion>& a, std::vector<Portion> b) {
    std::vector<Portion> c = a;
    std::sort(c.begin(), c.end());
    std::sort(b.begin(), b.end());
    return c == b;
}

}  // namespace

std::string WiretapScenario::tag() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < observed.size(); ++i)
        os << (i ? "_" : "") << portion_name(observed[i]);
    if (observed.empty()) os << "none";
    return os.str();
}

WiretapScenario WiretapScenario::parse(const std::string& tag) {
    WiretapScenario s;
    if (tag == "none" || tag.empty()) return s;
    std::istringstream is(tag);
    std::string piece;
    while (std::getline(is, piece, '_')) {
        if (piece == "vx") s.observed.push_back(Portion::v_x);
        else if (piece == "vcx") s.observed.push_back(Portion::v_cx);
        else if (piece == "vcy") s.observed.push_back(Portion::v_cy);
        else if (piece == "vy") s.observed.push_back(Portion::v_y);
        else throw domain_error("WiretapScenario: unknown portion '" + piece + "'");
    }
    return s;
}

Tolerance::Tolerance(double delta, double delta1)
    : delta_bits(delta), delta1_bits(delta1) {
    if (delta < 0.0 || delta1 < 0.0)
        throw domain_error("Tolerance: negative slack");
    if (delta1 > delta)
        throw domain_error("Tolerance: delta1 must not exceed delta");
}

PortionEntropies measure_portion_entropies(const JointPmf& pmf, int k,
                                           const LinearEncoder& enc) {
    PortionEntropies pe;
    pe.h_vx = exact_observation_entropy(pmf, k, portion_view(enc, {Portion::v_x}));
    pe.h_vcx = exact_observation_entropy(pmf, k, portion_view(enc, {Portion::v_cx}));
    pe.h_vcy = exact_observation_entropy(pmf, k, portion_view(enc, {Portion::v_cy}));
    pe.h_vy = exact_observation_entropy(pmf, k, portion_view(enc, {Portion::v_y}));
    pe.h_xk = entropy(pmf, {0}).bits * k;
    return pe;
}

BoundInterval bound_interval(const WiretapScenario& scenario,
                             const PortionEntropies& pe, const Tolerance& tol) {
    BoundInterval b;
    const double d = tol.delta_bits;
    if (same_portions(scenario.observed, {Portion::v_x, Portion::v_y})) {
        b.upper = pe.h_xk - pe.h_vcx - pe.h_vcy + d;
        b.has_closed_form = true;
    } else if (same_portions(scenario.observed, {Portion::v_cx, Portion::v_cy}) ||
               same_portions(scenario.observed,
                             {Portion::v_cx, Portion::v_cy, Portion::v_y})) {
        b.upper = pe.h_xk - pe.h_vx - pe.h_vcy + d;
        b.has_closed_form = true;
    } else if (same_portions(scenario.observed, {Portion::v_y, Portion::v_cy})) {
        b.lower = pe.h_vcy - d;
        b.upper = pe.h_xk - pe.h_vx - pe.h_vcx + d;
        b.has_closed_form = true;
    }
    return b;
}

LeakageReport measure_leakage(const JointPmf& pmf, int k, const LinearEncoder& enc,
                              const WiretapScenario& scenario,
                              const Tolerance& tol) {
    if (scenario.target.empty())
        throw domain_error("measure_leakage: empty target");
    LeakageReport r;
    r.scenario = scenario;
    r.k = k;
    r.slack_used = tol;
    if (scenario.observed.empty()) {
        r.measured_bits = 0.0;
        r.satisfied = true;
        return r;
    }
    ObservationMap view = portion_view(enc, scenario.observed);
    auto mi = exact_mutual_information(pmf, k, view, scenario.target);
    r.measured_bits = mi.h_bits;
    r.enumeration_size = mi.enumeration_size;

    PortionEntropies pe = measure_portion_entropies(pmf, k, enc);
    BoundInterval b = bound_interval(scenario, pe, tol);
    r.lower_bound_bits = b.lower;
    r.upper_bound_bits = b.upper;
    if (b.has_closed_form) {
        double need = 0.0;
        // bounds at delta=0 so the slack needed is explicit
        BoundInterval b0 = bound_interval(scenario, pe, Tolerance{});
        if (b0.upper) need = std::max(need, r.measured_bits - *b0.upper);
        if (b0.lower) need = std::max(need, *b0.lower - r.measured_bits);
        r.delta_star = std::max(0.0, need);
        r.satisfied = r.delta_star <= tol.delta_bits + 1e-12;
    } else {
        r.delta_star = 0.0;
        r.satisfied = true;
    }
    return r;
}

std::string leakage_csv_header() {
    return "scenario,k,measured_bits,lower_bound_bits,upper_bound_bits,delta,"
           "delta_star,satisfied";
}

std::string leakage_csv_row(const LeakageReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.scenario.tag() << "," << r.k << "," << r.measured_bits << ",";
    if (r.lower_bound_bits) os << *r.lower_bound_bits;
    os << ",";
    if (r.upper_bound_bits) os << *r.upper_bound_bits;
    os << "," << r.slack_used.delta_bits << "," << r.delta_star << ","
       << (r.satisfied ? 1 : 0);
    return os.str();
}

std::string leakage_json(const LeakageReport& r) {
    nlohmann::json j;
    j["scenario"] = r.scenario.tag();
    j["k"] = r.k;
    j["measured_bits"] = r.measured_bits;
    if (r.lower_bound_bits) j["lower_bound_bits"] = *r.lower_bound_bits;
    if (r.upper_bound_bits) j["upper_bound_bits"] = *r.upper_bound_bits;
    j["delta"] = r.slack_used.delta_bits;
    j["delta_star"] = r.delta_star;
    j["satisfied"] = r.satisfied;
    return j.dump();
}

}  // namespace cswlab
