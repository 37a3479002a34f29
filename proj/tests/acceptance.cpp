/*
 * Acceptance suite: end-to-end checks of the bundled fixtures, the
 * construction, the delivery protocol and the verifiers. Prints one
 * PASS/FAIL line per criterion and exits nonzero on any failure.
 */
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hotcache/design.hpp"
#include "hotcache/hhpda.hpp"
#include "hotcache/mds.hpp"
#include "hotcache/pda.hpp"
#include "hotcache/sim.hpp"

using namespace hotcache;

namespace {

struct Checker {
    std::vector<std::string> failures;
    std::string detail;

    void require(bool ok, const std::string& msg) {
        if (!ok) failures.push_back(msg);
    }
};

const std::vector<UserId> kTau{{1, 1}, {2, 2}, {3, 1}};
const std::vector<int> kZeta{1, 2, 12, 7, 4, 13, 3, 8, 14};

bool verdict_mentions(const Verdict& v, const std::string& needle) {
    for (const auto& msg : v.violations)
        if (msg.find(needle) != std::string::npos) return true;
    return false;
}

// All admissible multiplicity vectors for a design: within the per-size
// candidate bounds, more inner rows than blocks through a point, and no
// more rows than blocks.
std::vector<std::vector<int>> admissible_a(const TDesign& d) {
    std::vector<long long> bound;
    for (int s = 1; s <= d.t - 1; ++s) bound.push_back(lambda_s_within_t(d, s));
    const long long lambda1 = lambda_s(d, 1);
    std::vector<std::vector<int>> out;
    std::vector<int> a(d.t - 1, 0);
    while (true) {
        long long rows = 0;
        for (int s = 1; s <= d.t - 1; ++s)
            rows += static_cast<long long>(a[s - 1]) * binom(d.t, s);
        if (rows > lambda1 && rows <= d.block_count()) out.push_back(a);
        int i = 0;
        while (i < d.t - 1 && a[i] == bound[i]) a[i++] = 0;
        if (i == d.t - 1) break;
        ++a[i];
    }
    return out;
}

int next_label(int label, int max_label) { return label == max_label ? 1 : label + 1; }

// ---------------------------------------------------------------------
// 1. golden fixture verifies exhaustively; every single-cell mutation fails

void criterion1(Checker& c) {
    const HhpdaPair pair = example_pair();
    c.require(pair.p == HhpdaParams{4, 2, 3, 14, 9, 3, 4, 5}, "fixture parameters are off");
    c.require(pair.s_labels.size() == 5, "|S| != 5");
    for (int k1 = 1; k1 <= 4; ++k1)
        c.require(pair.sk_labels[k1 - 1].size() == 6,
                  "|S_" + std::to_string(k1) + "| != 6");

    const Verdict v = verify_hhpda(pair, Coverage::all());
    c.require(v.ok(), "fixture fails verification: " +
                          (v.violations.empty() ? "?" : v.violations[0]));
    bool scanned56 = false;
    for (const auto& note : v.notes)
        if (note.find("scanned 56 active sets") != std::string::npos) scanned56 = true;
    c.require(scanned56, "exhaustive scan did not cover 56 active sets");

    int mutations = 0, rejected = 0;
    auto check_mutant = [&](const HhpdaPair& mutant) {
        ++mutations;
        if (!verify_hhpda(mutant, Coverage::all()).ok()) ++rejected;
    };

    for (int r = 1; r <= 14; ++r)
        for (int col = 1; col <= 4; ++col) {
            HhpdaPair m = pair;
            m.q0.at(r, col) = m.q0.at(r, col).is_star() ? Cell::null() : Cell::star();
            check_mutant(m);
        }
    for (int k1 = 1; k1 <= 4; ++k1)
        for (int r = 1; r <= 14; ++r)
            for (int col = 1; col <= 2; ++col) {
                const Cell cell = pair.mirror_grid(k1).at(r, col);
                HhpdaPair m = pair;
                if (cell.is_star())
                    m.qsub[k1 - 1].at(r, col) = Cell::null();
                else if (cell.is_null())
                    m.qsub[k1 - 1].at(r, col) = Cell::star();
                else
                    m.qsub[k1 - 1].at(r, col) =
                        Cell::label(next_label(cell.label_value(), 29));
                check_mutant(m);
            }
    for (int r = 1; r <= 9; ++r)
        for (int col = 1; col <= 3; ++col) {
            const Cell cell = pair.b.at(r, col);
            HhpdaPair m = pair;
            m.b.at(r, col) = cell.is_star()
                                 ? Cell::null()
                                 : Cell::label(next_label(cell.label_value(), 29));
            check_mutant(m);
        }

    c.require(rejected == mutations, std::to_string(mutations - rejected) + " of " +
                                         std::to_string(mutations) +
                                         " single-cell mutations slipped through");
    c.detail = "56 active sets scanned, " + std::to_string(mutations) +
               " single-cell mutations all rejected";
}

// ---------------------------------------------------------------------
// 2. construction reproduces the fixture cell for cell

void criterion2(Checker& c) {
    const HhpdaPair built = build_from_design(load_design("ex2-3-8-4-1"), 2, {1, 2});
    const HhpdaPair golden = example_pair();
    c.require(built.p == golden.p, "parameters differ");
    c.require(built.q0 == golden.q0, "mirror layers differ");
    c.require(built.qsub == golden.qsub, "user grids differ");
    c.require(built.b == golden.b, "inner arrays differ");
    c.require(built.s_labels == golden.s_labels, "label sets differ");
    c.require(built.sk_labels == golden.sk_labels, "per-mirror label sets differ");
    c.detail = "built arrays are cell-identical to the fixture";
}

// ---------------------------------------------------------------------
// 3. closed-form parameters match counted values exactly

void criterion3(Checker& c) {
    const TDesign d = load_design("ex2-3-8-4-1");
    const ParamRecord rec = construction_params(d, 2, {1, 2});
    c.require(rec.p.fprime == 9, "F' != 9");
    c.require(rec.p.z1 == 3, "Z1 != 3");
    c.require(rec.p.z2 == 4, "Z2 != 4");
    c.require(rec.p.zprime == 5, "Z' != 5");
    c.require(rec.s_size == 5, "|S| != 5");
    c.require(rec.sk_size == 6, "|S_k1| != 6");

    const HhpdaPair pair = build_from_design(d, 2, {1, 2});
    c.require(static_cast<int>(pair.s_labels.size()) == rec.s_size, "counted |S| differs");
    for (int k1 = 1; k1 <= pair.p.k1; ++k1) {
        c.require(pair.q0.column_star_count(k1) == rec.p.z1, "counted Z1 differs");
        c.require(static_cast<int>(pair.sk_labels[k1 - 1].size()) == rec.sk_size,
                  "counted |S_k1| differs");
        for (int col = 1; col <= pair.p.k2; ++col)
            c.require(pair.mirror_grid(k1).column_star_count(col) == rec.p.z2,
                      "counted Z2 differs");
    }
    const PdaCheck bc = verify_pda(pair.b);
    c.require(bc.stars == rec.p.zprime, "counted Z' differs");
    c.detail = "F'=9 Z1=3 Z2=4 Z'=5 |S|=5 |S_k1|=6, all equal to counts on the arrays";
}

// ---------------------------------------------------------------------
// 4. the printed session: row set, loads, bit-exact decodes

void criterion4(Checker& c) {
    const HhpdaPair pair = example_pair();
    const Library lib = make_library(3, 9 * 64, 424242);
    const SessionReport rep =
        run_session(pair, lib, kTau, {1, 2, 3}, ZetaStrategy::PreferMirrorStar, 424242);
    c.require(rep.zeta == kZeta, "row set differs from the printed one");
    c.require(rep.r1_measured.num == 5 && rep.r1_measured.den == 9, "R1 != 5/9");
    c.require(rep.r2_measured.num == 7 && rep.r2_measured.den == 9, "R2 != 7/9");
    c.require(rep.loads_match, "measured loads disagree with the formulas");
    c.require(rep.decodes.size() == 3, "expected three active users");
    for (const DecodeResult& d : rep.decodes)
        c.require(d.ok, "a user failed to decode bit-exactly");
    c.detail = "zeta = {1,2,12,7,4,13,3,8,14}, R1 = 5/9, R2 = 7/9, 3/3 decodes bit-exact";
}

// ---------------------------------------------------------------------
// 5. exhaustive sweep, both strategies, measured == formula everywhere

void criterion5(Checker& c) {
    const HhpdaPair pair = example_pair();
    const Library lib = make_library(4, 9 * 64, 20240501);
    int sessions = 0;
    for (ZetaStrategy strategy :
         {ZetaStrategy::PreferMirrorStar, ZetaStrategy::AvoidMirrorStar}) {
        SweepOptions opt;
        opt.demands_per_tau = 3;
        opt.strategy = strategy;
        opt.seed = 20240501;
        const auto rows = sweep(pair, lib, opt);
        c.require(rows.size() == 168, "expected 56 x 3 sessions per strategy");
        for (const SessionReport& r : rows) {
            ++sessions;
            c.require(r.error.empty(), "session error: " + r.error);
            c.require(r.all_decoded, "decode failure under " + to_string(strategy));
            c.require(r.r1_measured.num == 5 && r.r1_measured.den == 9,
                      "R1 != 5/9 in a session");
            c.require(r.loads_match, "per-mirror counts disagree with the union formula");
        }
    }
    c.detail = std::to_string(sessions) +
               " sessions (56 active sets x 3 demand vectors x 2 strategies), 100% decode, "
               "loads match the formula in every session";
}

// ---------------------------------------------------------------------
// 6. erasure property of the codec

void criterion6(Checker& c) {
    const GeneratorMatrix g = mds_generator(14, 9);
    SplitMix64 rng(6502);
    std::vector<Packet> info(9, Packet(9, 0));
    for (auto& p : info)
        for (auto& b : p) b = static_cast<std::uint8_t>(rng.next());
    const auto coded = mds_encode(g, info);
    int subsets = 0, good = 0;
    for_each_subset(14, 9, [&](const std::vector<int>& idx) {
        std::vector<Share> shares;
        for (int i : idx) shares.push_back({i, coded[i - 1]});
        ++subsets;
        if (mds_decode(g, shares) == info) ++good;
    });
    c.require(subsets == 2002, "subset count != 2002");
    c.require(good == subsets, "an exhaustive (14,9) subset failed to decode");

    int sampled = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(39));
        const int k = 1 + static_cast<int>(rng.below(n));
        const GeneratorMatrix gr = mds_generator(n, k);
        std::vector<Packet> inf(k, Packet(4, 0));
        for (auto& p : inf)
            for (auto& b : p) b = static_cast<std::uint8_t>(rng.next());
        const auto cod = mds_encode(gr, inf);
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i + 1;
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
        std::vector<Share> shares;
        for (int i = 0; i < k; ++i) shares.push_back({order[i], cod[order[i] - 1]});
        if (mds_decode(gr, shares) == inf) ++sampled;
    }
    c.require(sampled == 1000, "a sampled (n,k) subset failed to decode");
    c.detail = "2002/2002 exhaustive (14,9) subsets and 1000/1000 sampled (n<=40) subsets "
               "decode exactly";
}

// ---------------------------------------------------------------------
// 7. PDA and hotplug-pair verifiers, with named violations

void criterion7(Checker& c) {
    const HhpdaPair pair = example_pair();
    const PdaCheck bc = verify_pda(pair.b);
    c.require(bc.verdict.ok() && bc.cols == 3 && bc.rows == 9 && bc.stars == 5 &&
                  bc.label_count == 5,
              "the inner array is not a (3,9,5,5) PDA");
    c.require(verify_hppda(projection_host(pair), pair.b).ok(),
              "the projection host does not pair with the inner array");

    int mutations = 0, rejected = 0, named = 0;
    auto check = [&](const PdaArray& mutant, const char* must_name) {
        ++mutations;
        const PdaCheck mc = verify_pda(mutant);
        if (!mc.verdict.ok()) ++rejected;
        if (must_name == nullptr || verdict_mentions(mc.verdict, must_name)) ++named;
    };
    for (int r = 1; r <= 9; ++r)
        for (int col = 1; col <= 3; ++col) {
            const Cell cell = pair.b.at(r, col);
            if (cell.is_star()) {
                PdaArray m = pair.b;
                m.at(r, col) = Cell::null();
                check(m, "C1");
            } else {
                {
                    PdaArray m = pair.b;
                    m.at(r, col) = Cell::null();
                    check(m, nullptr);
                }
                for (int other = 1; other <= 5; ++other) {
                    if (other == cell.label_value()) continue;
                    PdaArray m = pair.b;
                    m.at(r, col) = Cell::label(other);
                    check(m, "C3");
                }
            }
        }
    c.require(rejected == mutations, std::to_string(mutations - rejected) +
                                         " inner-array mutations slipped through");
    c.require(named == mutations, "a violation did not name the broken condition");
    c.detail = "(3,9,5,5) PDA and projection pair verified; " + std::to_string(mutations) +
               " single-cell mutations rejected with the violated condition named";
}

// ---------------------------------------------------------------------
// 8. design layer: verification, counting, located failures

void criterion8(Checker& c) {
    const TDesign ex1 = load_design("ex1-2-10-4-2");
    const TDesign ex2 = load_design("ex2-3-8-4-1");
    c.require(verify_design(ex1).ok(), "the 2-(10,4,2) design fails verification");
    c.require(verify_design(ex2).ok(), "the 3-(8,4,1) design fails verification");

    int checked = 0;
    auto check_counts = [&](const TDesign& d) {
        for (int s = 0; s <= d.t; ++s) {
            const long long closed = lambda_s(d, s);
            bool constant = true;
            for_each_subset(d.v, s, [&](const std::vector<int>& pts) {
                if (count_containing_avoiding(d, pts, {}) != closed) constant = false;
            });
            ++checked;
            c.require(constant, "lambda_s brute force disagrees with the closed form");
        }
    };
    check_counts(ex1);
    check_counts(ex2);
    for (int v = 4; v <= 8; ++v)
        for (int k = 2; k < v; ++k)
            for (int t = 1; t <= k; ++t) {
                const TDesign d = complete_design(v, k, t);
                c.require(verify_design(d).ok(), "a complete design fails verification");
                check_counts(d);
            }

    int removals = 0, located = 0;
    for (const TDesign& base : {ex1, ex2}) {
        for (int drop = 0; drop < base.block_count(); ++drop) {
            TDesign d = base;
            d.blocks.erase(d.blocks.begin() + drop);
            const Verdict v = verify_design(d);
            ++removals;
            if (!v.ok() && verdict_mentions(v, "t-subset")) ++located;
        }
    }
    c.require(removals == located, "a block removal was not located by an undercovered "
                                   "t-subset");
    c.detail = std::to_string(checked) + " lambda_s closed forms matched brute force; " +
               std::to_string(removals) + " block removals all located";
}

// ---------------------------------------------------------------------
// 9. integer uniqueness and exhaustive verification across constructions

void criterion9(Checker& c) {
    struct Input { TDesign d; int k2; };
    const std::vector<Input> inputs = {{load_design("ex2-3-8-4-1"), 2},
                                       {load_design("ex2-3-8-4-1"), 1},
                                       {load_design("ex1-2-10-4-2"), 1},
                                       {complete_design(6, 4, 3), 2},
                                       {complete_design(6, 4, 3), 1}};
    int pairs = 0;
    for (const Input& in : inputs) {
        for (const auto& a : admissible_a(in.d)) {
            const HhpdaPair pair = build_from_design(in.d, in.k2, a);
            ++pairs;
            std::set<int> seen;
            bool unique = true;
            for (const auto& grid : pair.qsub)
                for (const Cell& cell : grid.cells)
                    if (cell.is_label() && !seen.insert(cell.label_value()).second)
                        unique = false;
            for (int k1 = 1; k1 <= pair.p.k1 && unique; ++k1)
                for (int label : pair.sk_labels[k1 - 1])
                    if (!seen.count(label)) unique = false;
            c.require(unique, "a user-layer label repeats or is missing");
            const Verdict v = verify_hhpda(pair, Coverage::all());
            c.require(v.ok(), "a constructed pair fails exhaustive verification: " +
                                  (v.violations.empty() ? "?" : v.violations[0]));
        }
    }
    c.require(pairs >= 8, "expected at least eight admissible constructions");
    c.detail = std::to_string(pairs) +
               " constructed pairs: every user-layer label unique, all exhaustively verified";
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<void(Checker&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "golden fixture verification and mutation rejection", criterion1},
        {2, "construction reproduces the fixture", criterion2},
        {3, "parameter arithmetic equals counted values", criterion3},
        {4, "printed session: row set, loads, decodes", criterion4},
        {5, "exhaustive hotplug sweep under both strategies", criterion5},
        {6, "erasure recovery from any k of n coded packets", criterion6},
        {7, "PDA and hotplug-pair verifiers with named violations", criterion7},
        {8, "design verification and block counting", criterion8},
        {9, "label uniqueness across constructed pairs", criterion9},
    };

    int failed = 0;
    for (const Criterion& cr : criteria) {
        Checker c;
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        if (c.failures.empty()) {
            std::cout << "PASS  criterion " << cr.id << ": " << cr.title;
            if (!c.detail.empty()) std::cout << ": " << c.detail;
            std::cout << "\n";
        } else {
            ++failed;
            std::cout << "FAIL  criterion " << cr.id << ": " << cr.title << ": "
                      << c.failures[0];
            if (c.failures.size() > 1)
                std::cout << " (+" << c.failures.size() - 1 << " more)";
            std::cout << "\n";
        }
    }
    if (failed) {
        std::cout << failed << " of " << criteria.size() << " criteria failed\n";
        return 1;
    }
    std::cout << "all " << criteria.size() << " criteria passed\n";
    return 0;
}
