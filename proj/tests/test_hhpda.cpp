#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "hotcache/hhpda.hpp"

using namespace hotcache;

namespace {

const std::vector<UserId> kExampleTau{{1, 1}, {2, 2}, {3, 1}};
const std::vector<int> kExampleZeta{1, 2, 12, 7, 4, 13, 3, 8, 14};

// Enumerates the multiplicity vectors the construction accepts for a
// design and mirror-group size: component-wise within bounds, with enough
// rows to exceed the per-point block count.
std::vector<std::vector<int>> admissible_a(const TDesign& d, int k2) {
    std::vector<long long> bound;
    for (int s = 1; s <= d.t - 1; ++s) bound.push_back(lambda_s_within_t(d, s));
    std::vector<std::vector<int>> out;
    std::vector<int> a(d.t - 1, 0);
    const long long lambda1 = lambda_s(d, 1);
    while (true) {
        long long rows = 0;
        for (int s = 1; s <= d.t - 1; ++s) rows += static_cast<long long>(a[s - 1]) * binom(d.t, s);
        if (rows > lambda1 && rows <= d.block_count()) out.push_back(a);
        int i = 0;
        while (i < d.t - 1 && a[i] == bound[i]) a[i++] = 0;
        if (i == d.t - 1) break;
        ++a[i];
    }
    (void)k2;
    return out;
}

int label_occurrences_in_q(const HhpdaPair& pair, int label) {
    int n = 0;
    for (const auto& grid : pair.qsub)
        for (const Cell& c : grid.cells)
            if (c.is_label() && c.label_value() == label) ++n;
    return n;
}

} // namespace

TEST_CASE("construction reproduces the golden pair cell for cell") {
    const TDesign d = load_design("ex2-3-8-4-1");
    const HhpdaPair built = build_from_design(d, 2, {1, 2});
    const HhpdaPair golden = example_pair();

    CHECK(built.p == golden.p);
    CHECK(built.q0 == golden.q0);
    REQUIRE(built.qsub.size() == golden.qsub.size());
    for (size_t i = 0; i < built.qsub.size(); ++i) CHECK(built.qsub[i] == golden.qsub[i]);
    CHECK(built.b == golden.b);
    CHECK(built.s_labels == golden.s_labels);
    CHECK(built.sk_labels == golden.sk_labels);
    CHECK(built.same_arrays(golden));
}

TEST_CASE("spot checks against the printed construction") {
    const HhpdaPair pair = build_from_design(load_design("ex2-3-8-4-1"), 2, {1, 2});
    // row 1 is block {1,2,3,4}: the first two mirror groups sit inside
    CHECK(pair.q0.at(1, 1).is_star());
    CHECK(pair.q0.at(1, 2).is_star());
    CHECK(pair.q0.at(1, 3).is_null());
    // its user row carries labels 6,7 under mirror 1
    CHECK(pair.mirror_grid(1).at(1, 1).label_value() == 6);
    CHECK(pair.mirror_grid(1).at(1, 2).label_value() == 7);
    // row 4 is block {1,3,5,7}: point 1 in the block, group {1,2} not inside
    CHECK(pair.q0.at(4, 1).is_null());
    CHECK(pair.mirror_grid(1).at(4, 1).is_star());
    CHECK(pair.mirror_grid(1).at(4, 2).is_null());
    // per-mirror label ranges continue past the inner array's labels
    CHECK(pair.sk_labels[0] == std::vector<int>{6, 7, 8, 9, 10, 11});
    CHECK(pair.sk_labels[1] == std::vector<int>{12, 13, 14, 15, 16, 17});
    CHECK(pair.sk_labels[2] == std::vector<int>{18, 19, 20, 21, 22, 23});
    CHECK(pair.sk_labels[3] == std::vector<int>{24, 25, 26, 27, 28, 29});
}

TEST_CASE("closed-form parameters match counts on the arrays") {
    const TDesign d = load_design("ex2-3-8-4-1");
    const ParamRecord rec = construction_params(d, 2, {1, 2});
    CHECK(rec.p.k1 == 4);
    CHECK(rec.p.k2 == 2);
    CHECK(rec.p.kprime == 3);
    CHECK(rec.p.f == 14);
    CHECK(rec.p.fprime == 9);
    CHECK(rec.p.z1 == 3);
    CHECK(rec.p.z2 == 4);
    CHECK(rec.p.zprime == 5);
    CHECK(rec.s_size == 5);
    CHECK(rec.sk_size == 6);
    CHECK(rec.m1_over_n == Ratio{1, 3});
    CHECK(rec.m2_over_n == Ratio{4, 9});
    CHECK(rec.server_load == Ratio{5, 9});

    CHECK(lambda_s(d, 1) - lambda_s(d, 2) == 4); // Z2 from the block counts

    const HhpdaPair pair = build_from_design(d, 2, {1, 2});
    CHECK(pair.p == rec.p);
    for (int c = 1; c <= pair.p.k1; ++c) CHECK(pair.q0.column_star_count(c) == rec.p.z1);
    for (int k1 = 1; k1 <= pair.p.k1; ++k1) {
        for (int c = 1; c <= pair.p.k2; ++c)
            CHECK(pair.mirror_grid(k1).column_star_count(c) == rec.p.z2);
        CHECK(static_cast<int>(pair.sk_labels[k1 - 1].size()) == rec.sk_size);
    }
    CHECK(static_cast<int>(pair.s_labels.size()) == rec.s_size);
}

TEST_CASE("construction precondition errors name the clause") {
    const TDesign d = load_design("ex2-3-8-4-1");
    CHECK_THROWS_AS(build_from_design(d, 3, {1, 2}), param_error);    // k2 = t
    CHECK_THROWS_AS(build_from_design(d, 0, {1, 2}), param_error);
    CHECK_THROWS_AS(build_from_design(d, 2, {1}), param_error);       // wrong length
    CHECK_THROWS_AS(build_from_design(d, 2, {3, 2}), param_error);    // a_1 over bound
    CHECK_THROWS_AS(build_from_design(d, 2, {0, 0}), param_error);    // empty
    CHECK_THROWS_AS(build_from_design(d, 2, {0, 2}), param_error);    // rows <= lambda_1

    const TDesign seven = complete_design(7, 4, 3); // v=7 not divisible by 2
    CHECK_THROWS_AS(build_from_design(seven, 2, {1, 2}), param_error);

    TDesign dup = d;
    dup.blocks.push_back(dup.blocks[0]);
    CHECK_THROWS_AS(build_from_design(dup, 2, {1, 2}), param_error);

    // single-user mirrors are legal: K2 = 1 < t, and users cache nothing
    const HhpdaPair thin = build_from_design(d, 1, {1, 2});
    CHECK(thin.p.k1 == 8);
    CHECK(thin.p.z1 == 7);
    CHECK(thin.p.z2 == 0);
    CHECK(verify_hhpda(thin, Coverage::sample(12, 1)).ok());
}

TEST_CASE("the golden pair verifies exhaustively") {
    const Verdict v = verify_hhpda(example_pair(), Coverage::all());
    CHECK(v.ok());
    bool scanned_all = false;
    for (const auto& note : v.notes)
        if (note.find("56") != std::string::npos) scanned_all = true;
    CHECK(scanned_all);
}

TEST_CASE("structural violations are caught before the scan") {
    SUBCASE("a deleted user-grid star breaks A2") {
        HhpdaPair pair = example_pair();
        pair.qsub[0].at(4, 1) = Cell::null();
        const Verdict v = verify_hhpda(pair, Coverage::all());
        REQUIRE_FALSE(v.ok());
        CHECK(v.violations[0].find("A2") != std::string::npos);
    }
    SUBCASE("memory beyond the subpacketization is rejected up front") {
        HhpdaPair pair = example_pair();
        pair.p.z1 = 5;
        pair.p.z2 = 4; // 5 + 4 >= 9
        const Verdict v = verify_hhpda(pair, Coverage::all());
        REQUIRE_FALSE(v.ok());
        CHECK(v.violations[0].find("Z1+Z2") != std::string::npos);
        CHECK(v.notes.empty()); // no scan happened
    }
    SUBCASE("sampled coverage also passes") {
        CHECK(verify_hhpda(example_pair(), Coverage::sample(10, 42)).ok());
    }
}

TEST_CASE("projection behaves like point membership on design-backed pairs") {
    const HhpdaPair pair = example_pair();
    const TDesign& d = pair.provenance->design;
    const PdaArray host = projection_host(pair);
    REQUIRE(host.rows == 14);
    REQUIRE(host.cols == 8);
    for (int r = 1; r <= host.rows; ++r)
        for (int c = 1; c <= host.cols; ++c) {
            const int point = c; // users in lexicographic order own points 1..8
            const bool member =
                std::find(d.blocks[r - 1].begin(), d.blocks[r - 1].end(), point) !=
                d.blocks[r - 1].end();
            CHECK(host.at(r, c).is_star() == member);
        }
}

TEST_CASE("the example active set") {
    const HhpdaPair pair = example_pair();

    SUBCASE("prefer-mirror-star reproduces the printed row set") {
        CHECK(find_zeta(pair, kExampleTau, ZetaStrategy::PreferMirrorStar) == kExampleZeta);
    }
    SUBCASE("avoid-mirror-star swaps the singleton picks") {
        const std::vector<int> expect{1, 2, 12, 7, 4, 13, 5, 9, 10};
        CHECK(find_zeta(pair, kExampleTau, ZetaStrategy::AvoidMirrorStar) == expect);
    }
    SUBCASE("first-fit takes the smallest candidates") {
        const std::vector<int> expect{1, 2, 12, 7, 4, 13, 3, 8, 10};
        CHECK(find_zeta(pair, kExampleTau, ZetaStrategy::FirstFit) == expect);
    }
    SUBCASE("the projection on the printed row set star-matches the inner array") {
        const PdaArray proj = project_subarray(pair, kExampleZeta, kExampleTau);
        for (int r = 1; r <= proj.rows; ++r)
            for (int c = 1; c <= proj.cols; ++c)
                CHECK(proj.at(r, c).is_star() == pair.b.at(r, c).is_star());
    }
    SUBCASE("fill_qbar equals the inner array") {
        const PdaArray qbar = fill_qbar(pair, kExampleZeta, kExampleTau);
        CHECK(qbar == pair.b);
        // erasing the filled labels recovers the projection
        PdaArray erased = qbar;
        for (Cell& c : erased.cells)
            if (c.is_label()) c = Cell::null();
        CHECK(erased == project_subarray(pair, kExampleZeta, kExampleTau));
    }
    SUBCASE("a wrong row set is a star mismatch") {
        std::vector<int> wrong = kExampleZeta;
        wrong[0] = 4;
        CHECK_THROWS_AS(fill_qbar(pair, wrong, kExampleTau), protocol_error);
    }
}

TEST_CASE("every strategy yields a star match for every active set") {
    const HhpdaPair pair = example_pair();
    const std::vector<UserId> users = pair.all_users();
    for_each_subset(static_cast<int>(users.size()), pair.p.kprime,
                    [&](const std::vector<int>& idx) {
                        std::vector<UserId> tau;
                        for (int i : idx) tau.push_back(users[i - 1]);
                        for (ZetaStrategy s : {ZetaStrategy::PreferMirrorStar,
                                               ZetaStrategy::AvoidMirrorStar,
                                               ZetaStrategy::FirstFit}) {
                            const std::vector<int> zeta = find_zeta(pair, tau, s);
                            CHECK(fill_qbar(pair, zeta, tau) == pair.b);
                        }
                    });
}

TEST_CASE("generic matching agrees with the design-backed finder") {
    HhpdaPair anonymous = example_pair();
    anonymous.provenance.reset();
    const std::vector<int> zeta =
        find_zeta(anonymous, kExampleTau, ZetaStrategy::PreferMirrorStar);
    CHECK(fill_qbar(anonymous, zeta, kExampleTau) == anonymous.b);
}

TEST_CASE("integer uniqueness and exhaustive verification on constructed pairs") {
    struct Input { TDesign d; int k2; };
    const Input inputs[] = {{load_design("ex2-3-8-4-1"), 2},
                            {load_design("ex1-2-10-4-2"), 1},
                            {complete_design(6, 4, 3), 2}};
    for (const Input& in : inputs) {
        const auto vectors = admissible_a(in.d, in.k2);
        REQUIRE(!vectors.empty());
        for (const auto& a : vectors) {
            const HhpdaPair pair = build_from_design(in.d, in.k2, a);
            std::set<int> all;
            for (const auto& sk : pair.sk_labels)
                for (int label : sk) {
                    CHECK(label_occurrences_in_q(pair, label) == 1);
                    CHECK(all.insert(label).second);
                }
            CHECK(verify_hhpda(pair, Coverage::all()).ok());
        }
    }
}

TEST_CASE("a larger instance holds up") {
    // complete 3-(8,4,5): 70 blocks, inner array of 45 rows
    const TDesign d = complete_design(8, 4, 3);
    REQUIRE(d.block_count() == 70);
    REQUIRE(lambda_s(d, 1) == 35);
    const HhpdaPair pair = build_from_design(d, 2, {10, 5});
    CHECK(pair.p.f == 70);
    CHECK(pair.p.fprime == 45);
    CHECK(pair.p.z1 == 15);
    CHECK(pair.p.z2 == 20);
    CHECK(verify_hhpda(pair, Coverage::all()).ok());

    const std::vector<UserId> tau{{1, 2}, {3, 1}, {4, 2}};
    const std::vector<int> zeta = find_zeta(pair, tau, ZetaStrategy::PreferMirrorStar);
    CHECK(fill_qbar(pair, zeta, tau) == pair.b);
}

TEST_CASE("a zero-memory mirror layer degenerates to a hotplug pair") {
    // Rebuild the golden pair with the mirror layer emptied: user grids
    // hold a star wherever the user's point lies in the block, no labels.
    const HhpdaPair base = example_pair();
    HhpdaPair flat;
    flat.p = base.p;
    flat.p.z1 = 0;
    flat.p.z2 = 7; // stars now count full point membership
    flat.q0 = PdaArray(base.p.f, base.p.k1);
    for (int k1 = 1; k1 <= base.p.k1; ++k1) {
        PdaArray grid(base.p.f, base.p.k2);
        for (int r = 1; r <= base.p.f; ++r)
            for (int c = 1; c <= base.p.k2; ++c) {
                const Cell cell = base.mirror_grid(k1).at(r, c);
                const bool starred =
                    cell.is_star() || cell.is_label() || base.q0.at(r, k1).is_star();
                if (starred) grid.at(r, c) = Cell::star();
            }
        flat.qsub.push_back(std::move(grid));
        flat.sk_labels.push_back({});
    }
    flat.b = base.b;
    flat.s_labels = base.s_labels;

    CHECK(verify_hhpda(flat, Coverage::all()).ok());

    // dropping the mirror layer leaves a valid hotplug pair
    PdaArray host(flat.p.f, flat.p.k1 * flat.p.k2);
    for (int k1 = 1; k1 <= flat.p.k1; ++k1)
        for (int r = 1; r <= flat.p.f; ++r)
            for (int c = 1; c <= flat.p.k2; ++c)
                host.at(r, (k1 - 1) * flat.p.k2 + c) = flat.mirror_grid(k1).at(r, c);
    CHECK(verify_hppda(host, flat.b).ok());
}

TEST_CASE("pair files") {
    const HhpdaPair pair = example_pair();
    const std::string path = "test_pair_roundtrip.json";
    store_pair(pair, path);
    const HhpdaPair back = load_pair(path);
    CHECK(back.same_arrays(pair));
    REQUIRE(back.provenance.has_value());
    CHECK(back.provenance->design_id == "ex2-3-8-4-1");
    CHECK(back.provenance->design.blocks == pair.provenance->design.blocks);
    CHECK(back.provenance->a == pair.provenance->a);

    // canonical files are byte-stable through a load/store cycle
    CHECK(pair_to_json(back) == pair_to_json(pair));
    std::remove(path.c_str());

    SUBCASE("overlapping label sets are rejected at load") {
        std::string text = pair_to_json(pair);
        // move label 6 into S as well
        const std::string needle = "\"S\": [";
        const size_t at = text.find(needle);
        REQUIRE(at != std::string::npos);
        text.insert(at + needle.size(), "6, ");
        CHECK_THROWS_AS(pair_from_json(text), parse_error);
    }
    SUBCASE("a missing user grid is rejected at load") {
        nlohmann::json j = nlohmann::json::parse(pair_to_json(pair));
        j["Q"].erase(3);
        CHECK_THROWS_AS(pair_from_json(j.dump()), parse_error);
    }
    SUBCASE("find_zeta works after a round trip") {
        store_pair(pair, path);
        const HhpdaPair again = load_pair(path);
        CHECK(find_zeta(again, kExampleTau, ZetaStrategy::PreferMirrorStar) == kExampleZeta);
        std::remove(path.c_str());
    }
}

TEST_CASE("active set arguments are validated") {
    const HhpdaPair pair = example_pair();
    CHECK_THROWS_AS(find_zeta(pair, {{1, 1}, {2, 2}}, ZetaStrategy::FirstFit), param_error);
    CHECK_THROWS_AS(find_zeta(pair, {{1, 1}, {1, 1}, {2, 2}}, ZetaStrategy::FirstFit),
                    param_error);
    CHECK_THROWS_AS(find_zeta(pair, {{1, 1}, {2, 2}, {9, 1}}, ZetaStrategy::FirstFit),
                    param_error);
    CHECK_THROWS_AS(project_subarray(pair, {0}, kExampleTau), param_error);
    CHECK_THROWS_AS(project_subarray(pair, {1}, {{5, 1}}), param_error);
}
