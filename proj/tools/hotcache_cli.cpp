/*
 * hotcache: command-line front end: verify designs and array pairs,
 * build pairs from designs, run delivery sessions and sweeps.
 *
 * Exit codes: 0 success/verified, 1 verification or decode failure,
 * 2 usage or parse error. HOTCACHE_THREADS caps worker threads.
 */
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hotcache/design.hpp"
#include "hotcache/hhpda.hpp"
#include "hotcache/pda.hpp"
#include "hotcache/sim.hpp"

namespace {

using namespace hotcache;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

void print_verdict(const Verdict& v, std::ostream& out) {
    for (const auto& msg : v.violations) out << "violation: " << msg << "\n";
    for (const auto& msg : v.warnings) out << "warning: " << msg << "\n";
    for (const auto& msg : v.notes) out << "note: " << msg << "\n";
    out << (v.ok() ? "verified" : "FAILED") << "\n";
}

std::vector<UserId> parse_active(const std::string& text) {
    std::vector<UserId> out;
    std::string s;
    for (char c : text)
        if (!isspace(static_cast<unsigned char>(c))) s += c;
    size_t at = 0;
    while (at < s.size()) {
        if (s[at] == ',') { ++at; continue; }
        int k1 = 0, k2 = 0, used = 0;
        if (std::sscanf(s.c_str() + at, "(%d,%d)%n", &k1, &k2, &used) != 2 || used <= 0)
            throw param_error("cannot parse active set '" + text +
                              "': expected \"(k1,k2),(k1,k2),...\"");
        out.push_back({k1, k2});
        at += static_cast<size_t>(used);
    }
    if (out.empty()) throw param_error("active set is empty");
    return out;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write '" + path + "'");
    out << text;
}

std::string params_human(const ParamRecord& rec) {
    std::ostringstream os;
    os << "K1=" << rec.p.k1 << " K2=" << rec.p.k2 << " K'=" << rec.p.kprime << " F=" << rec.p.f
       << " F'=" << rec.p.fprime << " Z1=" << rec.p.z1 << " Z2=" << rec.p.z2
       << " Z'=" << rec.p.zprime << " |S|=" << rec.s_size << " |S_k1|=" << rec.sk_size << "\n"
       << "M1/N=" << rec.m1_over_n.str() << " M2/N=" << rec.m2_over_n.str()
       << " R1=" << rec.server_load.str() << "\n";
    return os.str();
}

std::string params_json(const ParamRecord& rec) {
    std::ostringstream os;
    os << "{\"K1\":" << rec.p.k1 << ",\"K2\":" << rec.p.k2 << ",\"Kprime\":" << rec.p.kprime
       << ",\"F\":" << rec.p.f << ",\"Fprime\":" << rec.p.fprime << ",\"Z1\":" << rec.p.z1
       << ",\"Z2\":" << rec.p.z2 << ",\"Zprime\":" << rec.p.zprime << ",\"S_size\":" << rec.s_size
       << ",\"Sk_size\":" << rec.sk_size << ",\"M1_over_N\":\"" << rec.m1_over_n.str()
       << "\",\"M2_over_N\":\"" << rec.m2_over_n.str() << "\",\"R1\":\""
       << rec.server_load.str() << "\"}\n";
    return os.str();
}

std::string report_human(const SessionReport& rep) {
    std::ostringstream os;
    os << "active:";
    for (const UserId& u : rep.tau) os << " (" << u.k1 << "," << u.k2 << ")";
    os << "\ndemands:";
    for (int d : rep.demands) os << " " << d;
    os << "\nstrategy: " << to_string(rep.strategy) << "  seed: " << rep.seed;
    os << "\nzeta:";
    for (int z : rep.zeta) os << " " << z;
    os << "\nR1 " << rep.r1_measured.str() << " (formula " << rep.r1_theory.str() << ")  R2 "
       << rep.r2_measured.str() << " (formula " << rep.r2_theory.str() << ")\n";
    for (const MirrorLoad& m : rep.measured_mirrors) {
        os << "mirror " << m.k1 << ": ";
        if (!m.active) {
            os << "idle\n";
            continue;
        }
        os << m.relay_count << " relayed + " << m.local_count << " local = "
           << Ratio{m.relay_count + m.local_count, rep.r1_measured.den}.str() << "\n";
    }
    for (const DecodeResult& d : rep.decodes)
        os << "user (" << d.user.k1 << "," << d.user.k2 << ") file " << d.demand << ": "
           << (d.ok ? "decoded" : "FAILED") << " (" << d.pooled_indices << " packets pooled)\n";
    os << "loads " << (rep.loads_match ? "match" : "MISMATCH") << ", "
       << (rep.all_decoded ? "all users decoded" : "DECODE FAILURE") << "\n";
    return os.str();
}

int cmd_design_verify(const std::string& source) {
    const TDesign d = load_design(source);
    const Verdict v = verify_design(d);
    std::cout << d.t << "-(" << d.v << "," << d.k << "," << d.lambda << ") design, "
              << d.block_count() << " blocks\n";
    print_verdict(v, std::cout);
    return v.ok() ? kOk : kFailed;
}

int cmd_design_complete(int v, int k, int t, const std::string& out_path) {
    const TDesign d = complete_design(v, k, t);
    write_output(design_to_json(d), out_path);
    return kOk;
}

int cmd_design_catalog(const std::string& id) {
    if (id.empty()) {
        for (const auto& entry : design_catalog()) {
            std::cout << entry.id << ": " << entry.design.t << "-(" << entry.design.v << ","
                      << entry.design.k << "," << entry.design.lambda << "), "
                      << entry.design.block_count() << " blocks";
            if (!entry.note.empty()) std::cout << " [" << entry.note << "]";
            std::cout << "\n";
        }
        return kOk;
    }
    std::cout << design_to_json(load_design(id));
    return kOk;
}

int cmd_hhpda_build(const std::string& design_src, int k2, const std::vector<int>& a,
                    const std::string& out_path) {
    const TDesign d = load_design(design_src);
    HhpdaPair pair = build_from_design(d, k2, a);
    for (const auto& entry : design_catalog())
        if (entry.id == design_src) pair.provenance->design_id = design_src;
    write_output(pair_to_json(pair), out_path);
    return kOk;
}

int cmd_hhpda_verify(const std::string& path, bool exhaustive, int sample, std::uint64_t seed,
                     const std::string& tau_text, const std::vector<int>& zeta,
                     const std::string& strategy_name) {
    const HhpdaPair pair = load_pair(path);
    if (!tau_text.empty()) {
        const std::vector<UserId> tau = parse_active(tau_text);
        std::vector<int> rows = zeta;
        if (rows.empty()) rows = find_zeta(pair, tau, zeta_strategy_from_string(strategy_name));
        const PdaArray qbar = fill_qbar(pair, rows, tau); // throws on star mismatch
        std::cout << "zeta:";
        for (int r : rows) std::cout << " " << r;
        std::cout << "\nstar match verified (" << qbar.rows << "x" << qbar.cols << ")\n";
        return kOk;
    }
    const Coverage cov = exhaustive ? Coverage::all() : Coverage::sample(sample, seed);
    const Verdict v = verify_hhpda(pair, cov);
    std::cout << "(" << pair.p.k1 << "," << pair.p.k2 << "," << pair.p.kprime << "; "
              << pair.p.f << "," << pair.p.fprime << "; " << pair.p.z1 << "," << pair.p.z2
              << "," << pair.p.zprime << ") pair, |S|=" << pair.s_labels.size() << "\n";
    print_verdict(v, std::cout);
    return v.ok() ? kOk : kFailed;
}

int cmd_hhpda_params(const std::string& design_src, int k2, const std::vector<int>& a,
                     const std::string& format) {
    const ParamRecord rec = construction_params(load_design(design_src), k2, a);
    std::cout << (format == "json" ? params_json(rec) : params_human(rec));
    return kOk;
}

int cmd_sim_run(const std::string& pair_path, const std::string& active, const std::string& dmd,
                int files, int packet_bytes, const std::string& strategy_name,
                std::uint64_t seed, const std::string& format, const std::string& out_path) {
    const HhpdaPair pair = load_pair(pair_path);
    const std::vector<UserId> tau = parse_active(active);
    std::vector<int> demands;
    {
        std::stringstream ss(dmd);
        for (std::string item; std::getline(ss, item, ',');)
            demands.push_back(std::stoi(item));
    }
    const Library lib = make_library(files, pair.p.fprime * packet_bytes, seed);
    const SessionReport rep = run_session(pair, lib, tau, demands,
                                          zeta_strategy_from_string(strategy_name), seed);
    write_output(format == "json" ? report_to_json(rep) : report_human(rep), out_path);
    return rep.all_decoded && rep.loads_match ? kOk : kFailed;
}

int cmd_sim_sweep(const std::string& pair_path, int files, int packet_bytes, int sample,
                  int repeats, const std::string& fixed, const std::string& strategy_name,
                  std::uint64_t seed, const std::string& out_path) {
    const HhpdaPair pair = load_pair(pair_path);
    const Library lib = make_library(files, pair.p.fprime * packet_bytes, seed);
    SweepOptions opt;
    opt.all_tau = sample < 0;
    opt.sample_tau = sample < 0 ? 0 : sample;
    opt.demands_per_tau = repeats;
    opt.strategy = zeta_strategy_from_string(strategy_name);
    opt.seed = seed;
    if (!fixed.empty()) {
        opt.random_demands = false;
        std::stringstream ss(fixed);
        for (std::string item; std::getline(ss, item, ',');)
            opt.fixed_demands.push_back(std::stoi(item));
    }
    const auto rows = sweep(pair, lib, opt);
    write_output(sweep_csv(rows), out_path);
    for (const SessionReport& r : rows)
        if (!r.error.empty() || !r.all_decoded || !r.loads_match) return kFailed;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hotcache: hierarchical hotplug coded caching toolkit"};
    app.require_subcommand(1);

    // design ----------------------------------------------------------
    auto* design = app.add_subcommand("design", "t-design operations");
    design->require_subcommand(1);

    std::string dv_source;
    auto* dverify = design->add_subcommand("verify", "check the defining conditions");
    dverify->add_option("source", dv_source, "catalog id or design JSON file")->required();

    int dc_v = 0, dc_k = 0, dc_t = 0;
    std::string dc_out;
    auto* dcomplete = design->add_subcommand("complete", "emit the complete k-subset design");
    dcomplete->add_option("--v", dc_v, "points")->required();
    dcomplete->add_option("--k", dc_k, "block size")->required();
    dcomplete->add_option("--t", dc_t, "strength")->required();
    dcomplete->add_option("-o,--output", dc_out, "output file (default stdout)");

    std::string cat_id;
    auto* dcatalog = design->add_subcommand("catalog", "list or print bundled designs");
    dcatalog->add_option("id", cat_id, "catalog id to print");

    // hhpda -----------------------------------------------------------
    auto* hhpda = app.add_subcommand("hhpda", "array pair operations");
    hhpda->require_subcommand(1);

    std::string hb_design, hb_out;
    int hb_k2 = 0;
    std::vector<int> hb_a;
    auto* hbuild = hhpda->add_subcommand("build", "construct a pair from a design");
    hbuild->add_option("--design", hb_design, "catalog id or design JSON file")->required();
    hbuild->add_option("--k2", hb_k2, "users per mirror")->required();
    hbuild->add_option("--a", hb_a, "multiplicities a_1..a_{t-1}")
        ->required()
        ->delimiter(',');
    hbuild->add_option("-o,--output", hb_out, "output file (default stdout)");

    std::string hv_path, hv_tau, hv_strategy = "prefer-mirror-star";
    bool hv_exhaustive = false;
    int hv_sample = 200;
    std::uint64_t hv_seed = 0;
    std::vector<int> hv_zeta;
    auto* hverify = hhpda->add_subcommand("verify", "check the defining conditions of a pair");
    hverify->add_option("pair", hv_path, "pair JSON file")->required();
    hverify->add_flag("--exhaustive", hv_exhaustive, "scan every active set");
    hverify->add_option("--sample", hv_sample, "active sets to sample (default 200)");
    hverify->add_option("--seed", hv_seed, "sampling seed");
    hverify->add_option("--tau", hv_tau, "verify one active set \"(k1,k2),...\" instead");
    hverify->add_option("--zeta", hv_zeta, "row set to check against --tau")->delimiter(',');
    hverify->add_option("--strategy", hv_strategy,
                        "row-set strategy when --tau is given without --zeta");

    std::string hp_design, hp_format = "human";
    int hp_k2 = 0;
    std::vector<int> hp_a;
    auto* hparams = hhpda->add_subcommand("params", "closed-form construction parameters");
    hparams->add_option("--design", hp_design, "catalog id or design JSON file")->required();
    hparams->add_option("--k2", hp_k2, "users per mirror")->required();
    hparams->add_option("--a", hp_a, "multiplicities a_1..a_{t-1}")->required()->delimiter(',');
    hparams->add_option("--format", hp_format, "human | json");

    // sim -------------------------------------------------------------
    auto* sim = app.add_subcommand("sim", "delivery simulation");
    sim->require_subcommand(1);

    std::string sr_pair, sr_active, sr_demands, sr_strategy = "prefer-mirror-star";
    std::string sr_format = "human", sr_out;
    int sr_files = 0, sr_bytes = 64;
    std::uint64_t sr_seed = 1;
    auto* srun = sim->add_subcommand("run", "run one delivery session");
    srun->add_option("--pair", sr_pair, "pair JSON file")->required();
    srun->add_option("--active", sr_active, "active users \"(k1,k2),...\"")->required();
    srun->add_option("--demands", sr_demands, "demanded file ids, comma separated")->required();
    srun->add_option("--files", sr_files, "library size N")->required();
    srun->add_option("--packet-bytes", sr_bytes, "packet length L (default 64)");
    srun->add_option("--strategy", sr_strategy, "row-set strategy");
    srun->add_option("--seed", sr_seed, "library/session seed (default 1)");
    srun->add_option("--format", sr_format, "human | json");
    srun->add_option("-o,--output", sr_out, "output file (default stdout)");

    std::string sw_pair, sw_strategy = "prefer-mirror-star", sw_out, sw_fixed;
    int sw_files = 0, sw_bytes = 64, sw_sample = -1, sw_repeats = 1;
    std::uint64_t sw_seed = 1;
    auto* ssweep = sim->add_subcommand("sweep", "run sessions across active sets, emit CSV");
    ssweep->add_option("--pair", sw_pair, "pair JSON file")->required();
    ssweep->add_option("--files", sw_files, "library size N")->required();
    ssweep->add_option("--packet-bytes", sw_bytes, "packet length L (default 64)");
    ssweep->add_option("--sample", sw_sample, "sample this many active sets (default: all)");
    ssweep->add_option("--repeats", sw_repeats, "demand vectors per active set (default 1)");
    ssweep->add_option("--demands", sw_fixed, "fixed demand vector (default: random)");
    ssweep->add_option("--strategy", sw_strategy, "row-set strategy");
    ssweep->add_option("--seed", sw_seed, "sweep seed (default 1)");
    ssweep->add_option("-o,--output", sw_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (dverify->parsed()) return cmd_design_verify(dv_source);
        if (dcomplete->parsed()) return cmd_design_complete(dc_v, dc_k, dc_t, dc_out);
        if (dcatalog->parsed()) return cmd_design_catalog(cat_id);
        if (hbuild->parsed()) return cmd_hhpda_build(hb_design, hb_k2, hb_a, hb_out);
        if (hverify->parsed())
            return cmd_hhpda_verify(hv_path, hv_exhaustive, hv_sample, hv_seed, hv_tau, hv_zeta,
                                    hv_strategy);
        if (hparams->parsed()) return cmd_hhpda_params(hp_design, hp_k2, hp_a, hp_format);
        if (srun->parsed())
            return cmd_sim_run(sr_pair, sr_active, sr_demands, sr_files, sr_bytes, sr_strategy,
                               sr_seed, sr_format, sr_out);
        if (ssweep->parsed())
            return cmd_sim_sweep(sw_pair, sw_files, sw_bytes, sw_sample, sw_repeats, sw_fixed,
                                 sw_strategy, sw_seed, sw_out);
    } catch (const protocol_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
