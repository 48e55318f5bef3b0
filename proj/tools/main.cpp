// Experiment runner: seeded sweeps over the leakage, cipher, region and
// network modules, with CSV/JSON reports carrying provenance columns.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "cswlab/cipher.hpp"
#include "cswlab/leakage.hpp"
#include "cswlab/netsim.hpp"
#include "cswlab/oracle.hpp"
#include "cswlab/pmf.hpp"
#include "cswlab/swcodec.hpp"

namespace {

using nlohmann::json;
using namespace cswlab;

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 1;

    std::string csv_suffix() const {
        std::ostringstream os;
        os << "," << config_hash << "," << seed << "," << kVersion;
        return os.str();
    }
    void annotate(json& j) const {
        j["config_hash"] = config_hash;
        j["seed"] = seed;
        j["version"] = kVersion;
    }
};

JointPmf pmf_from_json(const json& spec) {
    if (spec.contains("dsbs")) return make_dsbs(spec.at("dsbs").get<double>());
    if (spec.contains("random")) {
        const json& r = spec.at("random");
        return make_random_pmf(r.at("sources").get<int>(),
                               r.at("seed").get<std::uint64_t>(),
                               r.value("alphabet", 2));
    }
    if (spec.contains("table")) return JointPmf::from_json(spec.at("table").dump());
    if (spec.contains("file")) {
        std::ifstream in(spec.at("file").get<std::string>());
        if (!in) throw domain_error("pmf file not found");
        std::stringstream buf;
        buf << in.rdbuf();
        return JointPmf::from_json(buf.str());
    }
    throw domain_error("pmf config needs one of: dsbs, random, table, file");
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int jobs = 0;
    std::optional<std::string> layout_override;
};

json load_config(const Options& opt) {
    if (opt.config_path.empty()) return json::object();
    std::ifstream in(opt.config_path);
    if (!in) throw domain_error("cannot open config: " + opt.config_path);
    return json::parse(in);
}

std::uint64_t effective_seed(const Options& opt, const json& cfg) {
    if (opt.seed) return *opt.seed;
    return cfg.value("seed", std::uint64_t{1});
}

void write_or_print(const Options& opt, const std::string& name,
                    const std::string& body) {
    if (opt.out_dir.empty()) {
        std::cout << body;
        if (!body.empty() && body.back() != '\n') std::cout << "\n";
        return;
    }
    std::filesystem::create_directories(opt.out_dir);
    std::filesystem::path p = std::filesystem::path(opt.out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw resource_error("cannot write " + p.string());
    out << body;
    if (!body.empty() && body.back() != '\n') out << "\n";
}

PortionLayout layout_for(const JointPmf& pmf, int k, double alpha,
                         const Options& opt, const json& cfg) {
    if (opt.layout_override) return PortionLayout::parse(*opt.layout_override);
    if (cfg.contains("layout"))
        return PortionLayout::parse(cfg.at("layout").get<std::string>());
    return build_layout(pmf, k, alpha);
}

// --- report builders ------------------------------------------------------

std::string entropy_report(const JointPmf& pmf, const Provenance& prov) {
    json j;
    const int n = pmf.num_sources();
    for (int i = 0; i < n; ++i)
        j["H_S" + std::to_string(i)] = entropy(pmf, {i}).bits;
    SourceSubset all;
    for (int i = 0; i < n; ++i) all.members.push_back(i);
    j["H_joint"] = entropy(pmf, all).bits;
    if (n == 2) {
        j["H_X_given_Y"] = conditional_entropy(pmf, {0}, {1}).bits;
        j["H_Y_given_X"] = conditional_entropy(pmf, {1}, {0}).bits;
        j["I_XY"] = conditional_mutual_information(pmf, {0, 1}, {}).bits;
    }
    prov.annotate(j);
    return j.dump(2);
}

std::string decompose_report(const JointPmf& pmf, const Provenance& prov) {
    std::ostringstream os;
    os.precision(12);
    os << "source,term,bits,config_hash,seed,version\n";
    for (int i = 0; i < pmf.num_sources(); ++i) {
        double sum = 0.0;
        for (const auto& t : entropy_decomposition(pmf, i)) {
            os << i << "," << t.descriptor << "," << t.quantity.bits
               << prov.csv_suffix() << "\n";
            sum += t.quantity.bits;
        }
        os << i << ",sum," << sum << prov.csv_suffix() << "\n";
        os << i << ",H(S" << i << ")," << entropy(pmf, {i}).bits
           << prov.csv_suffix() << "\n";
    }
    return os.str();
}

std::string leakage_report(const json& cfg, const Options& opt,
                           const Provenance& prov) {
    JointPmf pmf = pmf_from_json(cfg.value("pmf", json{{"dsbs", 0.1}}));
    std::vector<int> ks = cfg.value("k", std::vector<int>{6});
    std::vector<double> alphas = cfg.value("alpha", std::vector<double>{0.5});
    std::vector<std::string> scenarios = cfg.value(
        "scenarios",
        std::vector<std::string>{"vx_vy", "vcx_vcy", "vcx_vcy_vy", "vy_vcy"});
    double delta = cfg.value("delta", 0.0);
    double delta1 = cfg.value("delta1", delta);

    std::ostringstream os;
    os << leakage_csv_header() << ",alpha,config_hash,seed,version\n";
    for (int k : ks) {
        for (double alpha : alphas) {
            PortionLayout layout = layout_for(pmf, k, alpha, opt, cfg);
            LinearEncoder enc(layout, prov.seed);
            for (const std::string& tag : scenarios) {
                WiretapScenario sc = WiretapScenario::parse(tag);
                LeakageReport r =
                    measure_leakage(pmf, k, enc, sc, Tolerance{delta, delta1});
                os << leakage_csv_row(r) << "," << alpha << prov.csv_suffix()
                   << "\n";
            }
        }
    }
    return os.str();
}

std::string cipher_report(const json& cfg, const Options& opt,
                          const Provenance& prov, int case_id,
                          const std::string& variant_name, double target,
                          bool independent) {
    JointPmf pmf = pmf_from_json(cfg.value("pmf", json{{"dsbs", 0.1}}));
    int k = cfg.value("k", std::vector<int>{3}).front();
    double alpha = cfg.value("alpha", std::vector<double>{0.5}).front();
    PortionLayout layout = layout_for(pmf, k, alpha, opt, cfg);
    CipherCase c = CipherCase::from_id(case_id);
    KeyVariant variant = variant_name == "composite" ? KeyVariant::composite
                                                     : KeyVariant::long_key;
    LinearEncoder enc(layout, prov.seed);
    CipherSplit split = CipherSplit::half_of(layout);
    KeySchedule keys = build_keys(c, layout, split, target, variant, pmf,
                                  prov.seed + case_id, independent);
    SecurityReport rep =
        measure_security(pmf, k, enc, keys, c, WiretapView::for_case(c));

    json j;
    j["case"] = case_id;
    j["variant"] = variant_name;
    j["independent_keys"] = independent;
    j["k"] = k;
    j["layout"] = layout.to_string();
    j["target_bits"] = target;
    j["key_bits_total"] = keys.total_random_bits;
    j["h_x_measured"] = rep.h_x_measured;
    j["h_y_measured"] = rep.h_y_measured;
    j["h_xy_measured"] = rep.h_xy_measured;
    j["enumeration_size"] = rep.enumeration_size;
    RatePoint point;
    point.r_kx = point.r_ky =
        static_cast<double>(keys.total_random_bits) / k;
    point.h_x = point.h_y = point.h_xy = target;
    json gaps = json::array();
    for (const auto& g : converse_gap(point, c, rep))
        gaps.push_back({{"constraint", g.constraint}, {"slack_bits", g.slack_bits}});
    j["converse_slack"] = gaps;
    prov.annotate(j);
    return j.dump(2);
}

std::string region_report(const json& cfg, const Provenance& prov) {
    JointPmf pmf = pmf_from_json(cfg.value("pmf", json{{"dsbs", 0.1}}));
    const json& rc = cfg.value("region", json::object());
    std::vector<int> cases = rc.value("cases", std::vector<int>{1, 2, 3, 4, 5});
    std::ostringstream os;
    os.precision(12);
    os << "case,r_x,r_y,r_kx,r_ky,h_x,h_y,h_xy,member,violations,"
          "config_hash,seed,version\n";
    for (int case_id : cases) {
        CipherCase c = CipherCase::from_id(case_id);
        for (const json& pj : rc.value("points", json::array())) {
            RatePoint p;
            p.r_x = pj.value("r_x", 0.0);
            p.r_y = pj.value("r_y", 0.0);
            p.r_kx = pj.value("r_kx", 0.0);
            p.r_ky = pj.value("r_ky", 0.0);
            p.h_x = pj.value("h_x", 0.0);
            p.h_y = pj.value("h_y", 0.0);
            p.h_xy = pj.value("h_xy", 0.0);
            RegionResult r = region_member(p, c, pmf);
            os << case_id << "," << p.r_x << "," << p.r_y << "," << p.r_kx
               << "," << p.r_ky << "," << p.h_x << "," << p.h_y << "," << p.h_xy
               << "," << (r.member ? 1 : 0) << ",";
            for (std::size_t i = 0; i < r.violations.size(); ++i)
                os << (i ? ";" : "") << r.violations[i];
            os << prov.csv_suffix() << "\n";
        }
    }
    return os.str();
}

std::string netsim_report(const json& cfg, const Provenance& prov) {
    const json& nc = cfg.value("netsim", json::object());
    MultiSourceConfig mc{
        pmf_from_json(nc.contains("pmf") ? nc.at("pmf")
                                         : cfg.value("pmf", json{{"dsbs", 0.1}})),
        nc.value("k", 3),
        nc.value("share_weights", std::vector<double>{}),
        {},
        prov.seed};
    for (bool b : nc.value("secure_links", std::vector<bool>{}))
        mc.secure_link.push_back(b);
    bool combination = nc.value("combination", false);

    MultiLayout layout = allocate_portions(mc);
    MultiEncoder enc(layout, mc.k, mc.seed);
    MaskPlan plan = plan_masks(mc, layout, combination);
    MaskedRateBound bound = masked_rate_bound(mc);

    std::ostringstream os;
    os.precision(12);
    os << "adversary,source,leakage_bits,masked,bound_bits,sw_sum_rate_bits,"
          "config_hash,seed,version\n";
    std::vector<std::vector<int>> sets =
        nc.value("adversary_sets", std::vector<std::vector<int>>{{}});
    for (const auto& tapped : sets) {
        std::string tag;
        for (std::size_t i = 0; i < tapped.size(); ++i)
            tag += (i ? ";" : "") + std::to_string(tapped[i]);
        if (tag.empty()) tag = "none";
        auto rows = simulate_network(mc, enc, plan, tapped);
        for (const auto& row : rows)
            os << tag << "," << row.source << "," << row.measured_bits << ",1,"
               << bound.bound_bits << "," << bound.sw_sum_rate_bits
               << prov.csv_suffix() << "\n";
    }
    return os.str();
}

std::vector<std::string> validate_config(const json& cfg) {
    std::vector<std::string> diags;
    try {
        JointPmf pmf = pmf_from_json(cfg.value("pmf", json{{"dsbs", 0.1}}));
        const int n = pmf.num_sources();
        for (int k : cfg.value("k", std::vector<int>{6})) {
            if (k < 2 || k > 16)
                diags.push_back("k=" + std::to_string(k) + " outside [2,16]");
            if (n * k > 28)
                diags.push_back("k=" + std::to_string(k) +
                                " exceeds the 2^28 enumeration budget");
        }
        for (double a : cfg.value("alpha", std::vector<double>{0.5}))
            if (a < 0.0 || a > 1.0)
                diags.push_back("alpha outside [0,1]");
        if (cfg.contains("scenarios"))
            for (const auto& s : cfg.at("scenarios")) {
                try {
                    WiretapScenario::parse(s.get<std::string>());
                } catch (const domain_error& e) {
                    diags.push_back(e.what());
                }
            }
        if (cfg.contains("cipher")) {
            const json& cc = cfg.at("cipher");
            double h_joint = entropy(pmf, {0, 1}).bits;
            double target = cc.value("target", 0.0);
            for (int id : cc.value("cases", std::vector<int>{1})) {
                if (id < 1 || id > 5) {
                    diags.push_back("cipher case outside 1..5");
                    continue;
                }
                double limit = h_joint;
                double hx = entropy(pmf, {0}).bits;
                double hy = entropy(pmf, {1}).bits;
                if (id == 2 || id == 5) limit = hx;
                if (id == 3) limit = std::max(hx, hy);
                if (id == 4) limit = hy;
                if (target < 0.0 || target > limit + 1e-12)
                    diags.push_back("cipher target outside the admissible range "
                                    "for case " + std::to_string(id));
            }
        }
    } catch (const std::exception& e) {
        diags.push_back(e.what());
    }
    return diags;
}

int run_all(const json& cfg, const Options& opt, const Provenance& prov) {
    if (opt.out_dir.empty())
        throw domain_error("run: --out directory required");
    std::vector<std::string> tasks =
        cfg.value("tasks", std::vector<std::string>{});
    std::sort(tasks.begin(), tasks.end());
    json manifest;
    manifest["config_hash"] = prov.config_hash;
    manifest["seed"] = prov.seed;
    manifest["version"] = kVersion;
    json statuses = json::array();
    for (const std::string& task : tasks) {
        json st;
        st["task"] = task;
        try {
            if (task == "entropy")
                write_or_print(opt, "entropy.json",
                               entropy_report(pmf_from_json(cfg.value(
                                                  "pmf", json{{"dsbs", 0.1}})),
                                              prov));
            else if (task == "decompose")
                write_or_print(opt, "decompose.csv",
                               decompose_report(pmf_from_json(cfg.value(
                                                    "pmf", json{{"dsbs", 0.1}})),
                                                prov));
            else if (task == "leakage")
                write_or_print(opt, "leakage.csv", leakage_report(cfg, opt, prov));
            else if (task == "cipher") {
                const json& cc = cfg.value("cipher", json::object());
                for (int id : cc.value("cases", std::vector<int>{1}))
                    write_or_print(
                        opt, "cipher_case" + std::to_string(id) + ".json",
                        cipher_report(cfg, opt, prov, id,
                                      cc.value("variant", std::string("long")),
                                      cc.value("target", 0.0),
                                      cc.value("independent_keys", false)));
            } else if (task == "region")
                write_or_print(opt, "region.csv", region_report(cfg, prov));
            else if (task == "netsim")
                write_or_print(opt, "netsim.csv", netsim_report(cfg, prov));
            else
                throw domain_error("unknown task: " + task);
            st["status"] = "ok";
        } catch (const resource_error& e) {
            st["status"] = "failed";
            st["error"] = e.what();
        }
        statuses.push_back(st);
    }
    manifest["tasks"] = statuses;
    write_or_print(opt, "manifest.json", manifest.dump(2));
    for (const json& st : statuses)
        if (st.at("status") != "ok") return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlated-source coding lab"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Options opt;
    app.add_option("--config", opt.config_path, "experiment config (JSON)");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "seed override");
    app.add_option("--out", opt.out_dir, "output directory (default: stdout)");
    app.add_option("--jobs", opt.jobs, "worker thread count");
    std::string layout_flag;
    auto* layout_opt =
        app.add_option("--layout", layout_flag, "layout override K:m_vx,m_cx,m_cy,m_vy");

    auto* cmd_entropy = app.add_subcommand("entropy", "pmf information quantities");
    auto* cmd_decompose = app.add_subcommand("decompose", "entropy decomposition table");
    auto* cmd_leakage = app.add_subcommand("leakage", "wiretap leakage sweep");
    auto* cmd_cipher = app.add_subcommand("cipher", "Shannon cipher measurement");
    auto* cmd_region = app.add_subcommand("region", "rate-region membership");
    auto* cmd_netsim = app.add_subcommand("netsim", "multi-source network run");
    auto* cmd_validate = app.add_subcommand("validate", "config diagnostics");
    auto* cmd_run = app.add_subcommand("run", "execute all configured tasks");

    int cipher_case = 1;
    std::string cipher_variant = "long";
    double cipher_target = 0.0;
    bool independent_keys = false;
    cmd_cipher->add_option("--case", cipher_case, "cipher case 1..5")
        ->check(CLI::Range(1, 5));
    cmd_cipher->add_option("--variant", cipher_variant, "long|composite")
        ->check(CLI::IsMember({"long", "composite"}));
    cmd_cipher->add_option("--target", cipher_target, "security target h (bits)");
    cmd_cipher->add_flag("--independent-keys", independent_keys,
                         "fresh full-width key per component");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count()) opt.seed = seed_flag;
    if (layout_opt->count()) opt.layout_override = layout_flag;
#ifdef _OPENMP
    if (opt.jobs > 0) omp_set_num_threads(opt.jobs);
#endif

    try {
        json cfg = load_config(opt);
        Provenance prov{hex64(fnv1a(cfg.dump())), effective_seed(opt, cfg)};

        if (cmd_validate->parsed()) {
            auto diags = validate_config(cfg);
            for (const auto& d : diags) std::cout << d << "\n";
            return diags.empty() ? 0 : 1;
        }
        if (cmd_entropy->parsed()) {
            write_or_print(opt, "entropy.json",
                           entropy_report(pmf_from_json(cfg.value(
                                              "pmf", json{{"dsbs", 0.1}})),
                                          prov));
            return 0;
        }
        if (cmd_decompose->parsed()) {
            write_or_print(opt, "decompose.csv",
                           decompose_report(pmf_from_json(cfg.value(
                                                "pmf", json{{"dsbs", 0.1}})),
                                            prov));
            return 0;
        }
        if (cmd_leakage->parsed()) {
            write_or_print(opt, "leakage.csv", leakage_report(cfg, opt, prov));
            return 0;
        }
        if (cmd_cipher->parsed()) {
            write_or_print(opt, "cipher.json",
                           cipher_report(cfg, opt, prov, cipher_case,
                                         cipher_variant, cipher_target,
                                         independent_keys));
            return 0;
        }
        if (cmd_region->parsed()) {
            write_or_print(opt, "region.csv", region_report(cfg, prov));
            return 0;
        }
        if (cmd_netsim->parsed()) {
            write_or_print(opt, "netsim.csv", netsim_report(cfg, prov));
            return 0;
        }
        if (cmd_run->parsed()) return run_all(cfg, opt, prov);
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
