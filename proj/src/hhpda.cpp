#include "hotcache/hhpda.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "grid_json.hpp"

namespace hotcache {

namespace {

std::string user_str(const UserId& u) {
    return "(" + std::to_string(u.k1) + "," + std::to_string(u.k2) + ")";
}

std::string tau_str(const std::vector<UserId>& tau) {
    std::string s = "{";
    for (size_t i = 0; i < tau.size(); ++i) {
        if (i) s += ",";
        s += user_str(tau[i]);
    }
    return s + "}";
}

// The point a user owns under the mirror grouping D_k1 = {(k1-1)K2+1, ..., k1 K2}.
int point_of(const UserId& u, int users_per_mirror) {
    return (u.k1 - 1) * users_per_mirror + u.k2;
}

struct BuildInputs {
    int k1_count = 0;
    int fprime = 0;
    long long lambda1 = 0;
    long long lambda_k2 = 0;
    std::vector<long long> a_bound; // lambda_s_within_t per s
};

BuildInputs check_build_inputs(const TDesign& d, int k2, const std::vector<int>& a) {
    Verdict dv = verify_design(d);
    if (!dv.ok())
        throw param_error("build_from_design: design fails verification: " + dv.violations[0]);
    {
        std::set<std::vector<int>> uniq(d.blocks.begin(), d.blocks.end());
        if (static_cast<int>(uniq.size()) != d.block_count())
            throw param_error("build_from_design: the construction requires non-repeated blocks");
    }
    if (k2 < 1) throw param_error("build_from_design: K2 must be positive");
    if (k2 >= d.t)
        throw param_error("build_from_design: K2 must be smaller than the design strength t (" +
                          std::to_string(k2) + " >= " + std::to_string(d.t) + ")");
    if (d.v % k2 != 0)
        throw param_error("build_from_design: K2=" + std::to_string(k2) +
                          " must divide v=" + std::to_string(d.v));
    if (static_cast<int>(a.size()) != d.t - 1)
        throw param_error("build_from_design: expected " + std::to_string(d.t - 1) +
                          " multiplicities a_1..a_" + std::to_string(d.t - 1) + ", got " +
                          std::to_string(a.size()));

    BuildInputs in;
    in.k1_count = d.v / k2;
    long long fprime = 0;
    for (int s = 1; s <= d.t - 1; ++s) {
        if (a[s - 1] < 0)
            throw param_error("build_from_design: a_" + std::to_string(s) + " is negative");
        long long bound = lambda_s_within_t(d, s);
        in.a_bound.push_back(bound);
        if (a[s - 1] > bound)
            throw param_error("build_from_design: a_" + std::to_string(s) + "=" +
                              std::to_string(a[s - 1]) + " exceeds the within-t block count " +
                              std::to_string(bound));
        fprime += static_cast<long long>(a[s - 1]) * binom(d.t, s);
    }
    if (fprime == 0) throw param_error("build_from_design: all multiplicities are zero");
    in.fprime = static_cast<int>(fprime);
    in.lambda1 = lambda_s(d, 1);
    in.lambda_k2 = lambda_s(d, k2);
    if (fprime <= in.lambda1)
        throw param_error("build_from_design: the inner array needs more than lambda_1=" +
                          std::to_string(in.lambda1) + " rows, got " + std::to_string(fprime));
    if (fprime > d.block_count())
        throw param_error("build_from_design: inner array rows " + std::to_string(fprime) +
                          " exceed the block count " + std::to_string(d.block_count()));
    return in;
}

} // namespace

std::string to_string(ZetaStrategy s) {
    switch (s) {
        case ZetaStrategy::PreferMirrorStar: return "prefer-mirror-star";
        case ZetaStrategy::AvoidMirrorStar: return "avoid-mirror-star";
        case ZetaStrategy::FirstFit: return "first-fit";
    }
    return "?";
}

ZetaStrategy zeta_strategy_from_string(const std::string& name) {
    if (name == "prefer-mirror-star") return ZetaStrategy::PreferMirrorStar;
    if (name == "avoid-mirror-star") return ZetaStrategy::AvoidMirrorStar;
    if (name == "first-fit") return ZetaStrategy::FirstFit;
    throw param_error("unknown strategy '" + name +
                      "' (prefer-mirror-star | avoid-mirror-star | first-fit)");
}

std::vector<UserId> HhpdaPair::all_users() const {
    std::vector<UserId> out;
    out.reserve(static_cast<size_t>(p.k1) * p.k2);
    for (int k1 = 1; k1 <= p.k1; ++k1)
        for (int k2 = 1; k2 <= p.k2; ++k2) out.push_back({k1, k2});
    return out;
}

HhpdaPair build_from_design(const TDesign& d, int k2, const std::vector<int>& a) {
    const BuildInputs in = check_build_inputs(d, k2, a);
    const int k1_count = in.k1_count;
    const int f = d.block_count();

    HhpdaPair pair;
    pair.p.k1 = k1_count;
    pair.p.k2 = k2;
    pair.p.kprime = d.t;
    pair.p.f = f;
    pair.p.fprime = in.fprime;
    pair.p.z1 = static_cast<int>(in.lambda_k2);
    pair.p.z2 = static_cast<int>(in.lambda1 - in.lambda_k2);

    std::vector<std::vector<int>> groups(k1_count);
    for (int k1 = 1; k1 <= k1_count; ++k1)
        for (int j = 1; j <= k2; ++j) groups[k1 - 1].push_back((k1 - 1) * k2 + j);

    // Mirror layer: star where the whole group lies inside the block.
    pair.q0 = PdaArray(f, k1_count);
    for (int r = 1; r <= f; ++r) {
        const auto& block = d.blocks[r - 1];
        for (int k1 = 1; k1 <= k1_count; ++k1) {
            if (std::includes(block.begin(), block.end(), groups[k1 - 1].begin(),
                              groups[k1 - 1].end()))
                pair.q0.at(r, k1) = Cell::star();
        }
    }

    pair.b = build_b_array(d.t, a);
    pair.s_labels = pair.b.labels();
    const int s_size = static_cast<int>(pair.s_labels.size());
    {
        PdaCheck bc = verify_pda(pair.b);
        if (!bc.verdict.ok())
            throw protocol_error("build_from_design: inner array is not a PDA: " +
                                 bc.verdict.violations[0]);
        pair.p.zprime = bc.stars;
    }

    // User layer: star for an owned point whose group is not fully inside
    // the block, the set label "block minus point" when it is. Set labels
    // become integers per mirror in row-major first-occurrence order,
    // continuing after the inner array's labels.
    int next_label = s_size + 1;
    pair.qsub.assign(k1_count, PdaArray(f, k2));
    pair.sk_labels.assign(k1_count, {});
    for (int k1 = 1; k1 <= k1_count; ++k1) {
        PdaArray& grid = pair.qsub[k1 - 1];
        std::map<std::vector<int>, int> assigned;
        for (int r = 1; r <= f; ++r) {
            const auto& block = d.blocks[r - 1];
            const bool group_inside = pair.q0.at(r, k1).is_star();
            for (int c = 1; c <= k2; ++c) {
                const int point = point_of({k1, c}, k2);
                if (!std::binary_search(block.begin(), block.end(), point)) continue;
                if (!group_inside) {
                    grid.at(r, c) = Cell::star();
                } else {
                    std::vector<int> rest;
                    for (int x : block)
                        if (x != point) rest.push_back(x);
                    auto [it, fresh] = assigned.try_emplace(rest, next_label);
                    if (fresh) {
                        pair.sk_labels[k1 - 1].push_back(next_label);
                        ++next_label;
                    }
                    grid.at(r, c) = Cell::label(it->second);
                }
            }
        }
    }

    pair.provenance = Provenance{"", d, k2, a, groups};

    // Counted parameters must match the closed forms, and every
    // user-layer label must be unique across the whole of Q.
    for (int k1 = 1; k1 <= k1_count; ++k1) {
        if (pair.q0.column_star_count(k1) != pair.p.z1)
            throw protocol_error("build_from_design: mirror column " + std::to_string(k1) +
                                 " star count differs from lambda_K2");
        for (int c = 1; c <= k2; ++c)
            if (pair.qsub[k1 - 1].column_star_count(c) != pair.p.z2)
                throw protocol_error("build_from_design: user column (" + std::to_string(k1) +
                                     "," + std::to_string(c) + ") star count is off");
    }
    {
        std::map<int, int> occurrences;
        for (const auto& grid : pair.qsub)
            for (const Cell& cell : grid.cells)
                if (cell.is_label()) ++occurrences[cell.label_value()];
        for (const auto& [label, n] : occurrences)
            if (n != 1)
                throw protocol_error("build_from_design: user-layer label " +
                                     std::to_string(label) + " occurs " + std::to_string(n) +
                                     " times");
        const long long expect_sk = in.lambda_k2 * k2;
        for (int k1 = 1; k1 <= k1_count; ++k1)
            if (static_cast<long long>(pair.sk_labels[k1 - 1].size()) != expect_sk)
                throw protocol_error("build_from_design: mirror " + std::to_string(k1) +
                                     " label count differs from lambda_K2 * K2");
    }
    return pair;
}

ParamRecord construction_params(const TDesign& d, int k2, const std::vector<int>& a) {
    const BuildInputs in = check_build_inputs(d, k2, a);
    ParamRecord rec;
    rec.p.k1 = in.k1_count;
    rec.p.k2 = k2;
    rec.p.kprime = d.t;
    rec.p.f = d.block_count();
    rec.p.fprime = in.fprime;
    rec.p.z1 = static_cast<int>(in.lambda_k2);
    rec.p.z2 = static_cast<int>(in.lambda1 - in.lambda_k2);
    long long zprime = 0, s_size = 0;
    for (int s = 1; s <= d.t - 1; ++s) {
        zprime += static_cast<long long>(a[s - 1]) * binom(d.t - 1, s - 1);
        s_size += static_cast<long long>(a[s - 1]) * binom(d.t, s + 1);
    }
    rec.p.zprime = static_cast<int>(zprime);
    rec.s_size = static_cast<int>(s_size);
    rec.sk_size = static_cast<int>(in.lambda_k2 * k2);
    rec.m1_over_n = {rec.p.z1, rec.p.fprime};
    rec.m2_over_n = {rec.p.z2, rec.p.fprime};
    rec.server_load = {rec.s_size, rec.p.fprime};
    return rec;
}

PdaArray project_subarray(const HhpdaPair& pair, const std::vector<int>& zeta_rows,
                          const std::vector<UserId>& tau) {
    for (int r : zeta_rows)
        if (r < 1 || r > pair.p.f)
            throw param_error("project_subarray: row " + std::to_string(r) + " outside [1, " +
                              std::to_string(pair.p.f) + "]");
    for (const UserId& u : tau)
        if (u.k1 < 1 || u.k1 > pair.p.k1 || u.k2 < 1 || u.k2 > pair.p.k2)
            throw param_error("project_subarray: user " + user_str(u) + " outside the network");

    PdaArray out(static_cast<int>(zeta_rows.size()), static_cast<int>(tau.size()));
    for (int r = 1; r <= out.rows; ++r) {
        const int f = zeta_rows[r - 1];
        for (int c = 1; c <= out.cols; ++c) {
            const UserId& u = tau[c - 1];
            if (pair.q0.at(f, u.k1).is_star() || pair.mirror_grid(u.k1).at(f, u.k2).is_star())
                out.at(r, c) = Cell::star();
        }
    }
    return out;
}

PdaArray projection_host(const HhpdaPair& pair) {
    std::vector<int> all_rows(pair.p.f);
    for (int r = 1; r <= pair.p.f; ++r) all_rows[r - 1] = r;
    return project_subarray(pair, all_rows, pair.all_users());
}

namespace {

std::vector<UserId> checked_tau(const HhpdaPair& pair, std::vector<UserId> tau) {
    if (static_cast<int>(tau.size()) != pair.p.kprime)
        throw param_error("active set must name exactly K'=" + std::to_string(pair.p.kprime) +
                          " users, got " + std::to_string(tau.size()));
    std::sort(tau.begin(), tau.end());
    for (size_t i = 0; i < tau.size(); ++i) {
        const UserId& u = tau[i];
        if (u.k1 < 1 || u.k1 > pair.p.k1 || u.k2 < 1 || u.k2 > pair.p.k2)
            throw param_error("active user " + user_str(u) + " outside the network");
        if (i > 0 && tau[i] == tau[i - 1])
            throw param_error("active user " + user_str(u) + " listed twice");
    }
    return tau;
}

// Count of tau members whose mirror group lies wholly inside the block of
// a row, the quantity the mirror-star strategies rank by. Restricted to
// the pattern row's star columns.
int mirror_star_count(const HhpdaPair& pair, int row, const std::vector<UserId>& tau,
                      const std::vector<int>& star_cols) {
    int n = 0;
    for (int c : star_cols)
        if (pair.q0.at(row, tau[c - 1].k1).is_star()) ++n;
    return n;
}

std::vector<int> find_zeta_design_backed(const HhpdaPair& pair, const std::vector<UserId>& tau,
                                         ZetaStrategy strategy) {
    const Provenance& prov = *pair.provenance;
    const TDesign& d = prov.design;
    const std::vector<BRowId> row_ids = b_row_ids(d.t, prov.a);
    if (static_cast<int>(row_ids.size()) != pair.b.rows)
        throw protocol_error("find_zeta: provenance multiplicities describe " +
                             std::to_string(row_ids.size()) + " inner rows, the array has " +
                             std::to_string(pair.b.rows));

    // Points owned by the active users, indexed by B column.
    std::vector<int> pts(tau.size());
    for (size_t j = 0; j < tau.size(); ++j) pts[j] = point_of(tau[j], prov.k2);

    std::vector<int> zeta(row_ids.size(), 0);
    size_t at = 0;
    while (at < row_ids.size()) {
        // Rows sharing the same subset Y sit a block of a_s copies apart;
        // gather the copy indices for this Y in row order.
        const std::vector<int>& y = row_ids[at].subset;
        const int s = static_cast<int>(y.size());
        std::vector<size_t> positions;
        for (size_t r = at; r < row_ids.size(); ++r)
            if (row_ids[r].subset == y) positions.push_back(r);

        std::vector<int> contain, avoid;
        for (size_t j = 0; j < tau.size(); ++j) {
            if (std::binary_search(y.begin(), y.end(), static_cast<int>(j) + 1))
                contain.push_back(pts[j]);
            else
                avoid.push_back(pts[j]);
        }
        std::sort(contain.begin(), contain.end());
        std::sort(avoid.begin(), avoid.end());

        std::vector<int> candidates;
        for (int r = 1; r <= d.block_count(); ++r) {
            const auto& block = d.blocks[r - 1];
            if (!std::includes(block.begin(), block.end(), contain.begin(), contain.end()))
                continue;
            bool hit = false;
            for (int p : avoid)
                if (std::binary_search(block.begin(), block.end(), p)) { hit = true; break; }
            if (!hit) candidates.push_back(r);
        }
        const long long expect = lambda_s_within_t(d, s);
        if (static_cast<long long>(candidates.size()) != expect)
            throw protocol_error("find_zeta: " + std::to_string(candidates.size()) +
                                 " candidate rows for a size-" + std::to_string(s) +
                                 " pattern row, expected " + std::to_string(expect));
        if (candidates.size() < positions.size())
            throw protocol_error("find_zeta: not enough candidate rows for active set " +
                                 tau_str(tau));

        if (strategy != ZetaStrategy::FirstFit) {
            std::vector<int> star_cols;
            for (int j : y) star_cols.push_back(j); // B stars sit exactly at Y's columns
            std::stable_sort(candidates.begin(), candidates.end(), [&](int lhs, int rhs) {
                int ml = mirror_star_count(pair, lhs, tau, star_cols);
                int mr = mirror_star_count(pair, rhs, tau, star_cols);
                if (ml != mr)
                    return strategy == ZetaStrategy::PreferMirrorStar ? ml > mr : ml < mr;
                return lhs < rhs;
            });
        }
        candidates.resize(positions.size());
        std::sort(candidates.begin(), candidates.end());
        for (size_t i = 0; i < positions.size(); ++i) zeta[positions[i]] = candidates[i];
        // Advance past every row of this Y (they are contiguous per copy
        // block but interleaved with other subsets; skip filled slots).
        while (at < row_ids.size() && zeta[at] != 0) ++at;
    }
    return zeta;
}

std::vector<int> find_zeta_generic(const HhpdaPair& pair, const std::vector<UserId>& tau,
                                   ZetaStrategy strategy) {
    PdaArray host(pair.p.f, static_cast<int>(tau.size()));
    for (int r = 1; r <= pair.p.f; ++r)
        for (int c = 1; c <= host.cols; ++c) {
            const UserId& u = tau[c - 1];
            if (pair.q0.at(r, u.k1).is_star() || pair.mirror_grid(u.k1).at(r, u.k2).is_star())
                host.at(r, c) = Cell::star();
        }

    std::vector<std::vector<int>> order(pair.b.rows);
    for (int br = 1; br <= pair.b.rows; ++br) {
        std::vector<int> star_cols;
        for (int c = 1; c <= pair.b.cols; ++c)
            if (pair.b.at(br, c).is_star()) star_cols.push_back(c);
        std::vector<int> rows(pair.p.f);
        for (int r = 1; r <= pair.p.f; ++r) rows[r - 1] = r;
        if (strategy != ZetaStrategy::FirstFit) {
            std::stable_sort(rows.begin(), rows.end(), [&](int lhs, int rhs) {
                int ml = mirror_star_count(pair, lhs, tau, star_cols);
                int mr = mirror_star_count(pair, rhs, tau, star_cols);
                if (ml != mr)
                    return strategy == ZetaStrategy::PreferMirrorStar ? ml > mr : ml < mr;
                return lhs < rhs;
            });
        }
        order[br - 1] = std::move(rows);
    }

    auto found = find_row_assignment(host, pair.b, &order);
    if (!found)
        throw protocol_error("find_zeta: no row set star-matches the inner array for " +
                             tau_str(tau));
    return *found;
}

} // namespace

std::vector<int> find_zeta(const HhpdaPair& pair, const std::vector<UserId>& tau_in,
                           ZetaStrategy strategy) {
    const std::vector<UserId> tau = checked_tau(pair, tau_in);
    std::vector<int> zeta = pair.provenance ? find_zeta_design_backed(pair, tau, strategy)
                                            : find_zeta_generic(pair, tau, strategy);

    // Postcondition, cheap enough to check every time.
    const PdaArray proj = project_subarray(pair, zeta, tau);
    for (int r = 1; r <= pair.b.rows; ++r)
        for (int c = 1; c <= pair.b.cols; ++c)
            if (proj.at(r, c).is_star() != pair.b.at(r, c).is_star())
                throw protocol_error("find_zeta: produced rows do not star-match the inner "
                                     "array (row " + std::to_string(r) + ")");
    return zeta;
}

PdaArray fill_qbar(const HhpdaPair& pair, const std::vector<int>& zeta,
                   const std::vector<UserId>& tau_in) {
    const std::vector<UserId> tau = checked_tau(pair, tau_in);
    if (static_cast<int>(zeta.size()) != pair.b.rows)
        throw param_error("fill_qbar: zeta must name " + std::to_string(pair.b.rows) + " rows");
    PdaArray out = project_subarray(pair, zeta, tau);
    for (int r = 1; r <= out.rows; ++r) {
        for (int c = 1; c <= out.cols; ++c) {
            const bool want_star = pair.b.at(r, c).is_star();
            if (out.at(r, c).is_star() != want_star)
                throw protocol_error("fill_qbar: star mismatch at (" + std::to_string(r) + "," +
                                     std::to_string(c) + ") for rows " +
                                     std::to_string(zeta[r - 1]));
            if (!want_star) out.at(r, c) = pair.b.at(r, c);
        }
    }
    return out;
}

Verdict verify_hhpda(const HhpdaPair& pair, const Coverage& coverage) {
    Verdict out;
    const HhpdaParams& p = pair.p;

    if (p.k1 < 1 || p.k2 < 1 || p.kprime < 1 || p.f < 1 || p.fprime < 1)
        out.fail("parameters must be positive");
    if (p.z1 + p.z2 >= p.fprime)
        out.fail("Z1+Z2=" + std::to_string(p.z1 + p.z2) + " must be smaller than F'=" +
                 std::to_string(p.fprime));
    if (p.fprime > p.f)
        out.fail("F'=" + std::to_string(p.fprime) + " exceeds F=" + std::to_string(p.f));
    if (p.kprime > p.k1 * p.k2)
        out.fail("K'=" + std::to_string(p.kprime) + " exceeds K1*K2=" +
                 std::to_string(p.k1 * p.k2));
    if (pair.q0.rows != p.f || pair.q0.cols != p.k1)
        out.fail("mirror layer is " + std::to_string(pair.q0.rows) + "x" +
                 std::to_string(pair.q0.cols) + ", expected " + std::to_string(p.f) + "x" +
                 std::to_string(p.k1));
    if (static_cast<int>(pair.qsub.size()) != p.k1)
        out.fail("expected " + std::to_string(p.k1) + " user grids, got " +
                 std::to_string(pair.qsub.size()));
    else
        for (int k1 = 1; k1 <= p.k1; ++k1)
            if (pair.mirror_grid(k1).rows != p.f || pair.mirror_grid(k1).cols != p.k2)
                out.fail("user grid " + std::to_string(k1) + " has wrong shape");
    if (pair.b.rows != p.fprime || pair.b.cols != p.kprime)
        out.fail("inner array is " + std::to_string(pair.b.rows) + "x" +
                 std::to_string(pair.b.cols) + ", expected " + std::to_string(p.fprime) + "x" +
                 std::to_string(p.kprime));
    if (static_cast<int>(pair.sk_labels.size()) != p.k1)
        out.fail("expected " + std::to_string(p.k1) + " per-mirror label sets");
    if (!out.ok()) return out;

    // Label-set disjointness.
    {
        std::set<int> s(pair.s_labels.begin(), pair.s_labels.end());
        std::set<int> all = s;
        for (int k1 = 1; k1 <= p.k1; ++k1) {
            for (int label : pair.sk_labels[k1 - 1]) {
                if (s.count(label))
                    out.fail("label " + std::to_string(label) + " belongs to both S and S_" +
                             std::to_string(k1));
                else if (!all.insert(label).second)
                    out.fail("label " + std::to_string(label) +
                             " belongs to two per-mirror sets (S_" + std::to_string(k1) + ")");
            }
        }
    }

    // A1 / A2: exact star counts; the mirror layer is star/null only.
    for (int c = 1; c <= p.k1; ++c) {
        for (int r = 1; r <= p.f; ++r)
            if (pair.q0.at(r, c).is_label())
                out.fail("A1: mirror cell (" + std::to_string(r) + "," + std::to_string(c) +
                         ") holds an integer");
        const int z = pair.q0.column_star_count(c);
        if (z != p.z1)
            out.fail("A1: mirror column " + std::to_string(c) + " has " + std::to_string(z) +
                     " stars, expected Z1=" + std::to_string(p.z1));
    }
    for (int k1 = 1; k1 <= p.k1; ++k1)
        for (int c = 1; c <= p.k2; ++c) {
            const int z = pair.mirror_grid(k1).column_star_count(c);
            if (z != p.z2)
                out.fail("A2: user column (" + std::to_string(k1) + "," + std::to_string(c) +
                         ") has " + std::to_string(z) + " stars, expected Z2=" +
                         std::to_string(p.z2));
        }

    // A3: labels confined to their own grid, all declared labels present,
    // and no null under a mirror star.
    for (int k1 = 1; k1 <= p.k1; ++k1) {
        const PdaArray& grid = pair.mirror_grid(k1);
        const std::set<int> declared(pair.sk_labels[k1 - 1].begin(),
                                     pair.sk_labels[k1 - 1].end());
        std::set<int> present;
        for (int r = 1; r <= p.f; ++r)
            for (int c = 1; c <= p.k2; ++c)
                if (grid.at(r, c).is_label()) {
                    const int label = grid.at(r, c).label_value();
                    present.insert(label);
                    if (!declared.count(label))
                        out.fail("A3: label " + std::to_string(label) + " at user cell (" +
                                 std::to_string(k1) + ": " + std::to_string(r) + "," +
                                 std::to_string(c) + ") is not in S_" + std::to_string(k1));
                }
        for (int label : declared)
            if (!present.count(label))
                out.fail("A3: declared label " + std::to_string(label) + " of S_" +
                         std::to_string(k1) + " never occurs");
        for (int r = 1; r <= p.f; ++r) {
            if (!pair.q0.at(r, k1).is_star()) continue;
            for (int c = 1; c <= p.k2; ++c)
                if (grid.at(r, c).is_null())
                    out.fail("A3: user cell (" + std::to_string(k1) + ": " + std::to_string(r) +
                             "," + std::to_string(c) +
                             ") is null although the mirror column holds a star");
        }
    }

    // A4: equal labels inside one user grid behave like PDA integers.
    for (int k1 = 1; k1 <= p.k1; ++k1) {
        const PdaArray& grid = pair.mirror_grid(k1);
        std::map<int, std::vector<std::pair<int, int>>> where;
        for (int r = 1; r <= p.f; ++r)
            for (int c = 1; c <= p.k2; ++c)
                if (grid.at(r, c).is_label())
                    where[grid.at(r, c).label_value()].push_back({r, c});
        for (const auto& [label, cells] : where)
            for (size_t i = 0; i < cells.size(); ++i)
                for (size_t j = i + 1; j < cells.size(); ++j) {
                    auto [r1, c1] = cells[i];
                    auto [r2, c2] = cells[j];
                    if (r1 == r2 || c1 == c2) {
                        out.fail("A4: label " + std::to_string(label) + " repeats in a row or "
                                 "column of user grid " + std::to_string(k1));
                        continue;
                    }
                    if (!grid.at(r1, c2).is_star() || !grid.at(r2, c1).is_star())
                        out.fail("A4: label " + std::to_string(label) + " in user grid " +
                                 std::to_string(k1) + " lacks stars at the cross positions");
                }
    }

    // The inner array must be a PDA over exactly the declared labels.
    {
        PdaCheck bc = verify_pda(pair.b);
        for (const auto& msg : bc.verdict.violations) out.fail("inner array: " + msg);
        if (bc.verdict.ok()) {
            if (bc.stars != p.zprime)
                out.fail("inner array has " + std::to_string(bc.stars) +
                         " stars per column, expected Z'=" + std::to_string(p.zprime));
            if (pair.b.labels() != pair.s_labels)
                out.fail("inner array labels differ from the declared set S");
        }
    }

    if (pair.provenance && pair.provenance->k2 == pair.provenance->design.t)
        out.note("provenance says K2 equals the design strength; the construction requires "
                 "K2 < t and such pairs are rejected by build_from_design");

    if (!out.ok()) return out;

    // Row-assignment condition over active sets.
    const std::vector<UserId> users = pair.all_users();
    const int n_users = static_cast<int>(users.size());
    std::vector<long long> ranks;
    if (coverage.exhaustive) {
        const long long total = binom(n_users, p.kprime);
        ranks.resize(total);
        for (long long i = 0; i < total; ++i) ranks[i] = i;
    } else {
        SplitMix64 rng(coverage.seed);
        const long long total = binom(n_users, p.kprime);
        std::set<long long> picked;
        for (int i = 0; i < coverage.samples && static_cast<long long>(picked.size()) < total;
             ++i)
            picked.insert(static_cast<long long>(rng.below(total)));
        ranks.assign(picked.begin(), picked.end());
    }

    std::vector<std::string> failures(ranks.size());
    parallel_for(static_cast<int>(ranks.size()), [&](int i) {
        const std::vector<int> subset = subset_unrank(ranks[i], n_users, p.kprime);
        std::vector<UserId> tau;
        for (int idx : subset) tau.push_back(users[idx]);
        PdaArray host(p.f, p.kprime);
        for (int r = 1; r <= p.f; ++r)
            for (int c = 1; c <= p.kprime; ++c) {
                const UserId& u = tau[c - 1];
                if (pair.q0.at(r, u.k1).is_star() ||
                    pair.mirror_grid(u.k1).at(r, u.k2).is_star())
                    host.at(r, c) = Cell::star();
            }
        if (!find_row_assignment(host, pair.b))
            failures[i] = "no row set star-matches the inner array for active set " +
                          tau_str(tau);
    });
    int scanned = static_cast<int>(ranks.size());
    for (const auto& msg : failures)
        if (!msg.empty()) out.fail(msg);
    out.note("scanned " + std::to_string(scanned) + " active set" + (scanned == 1 ? "" : "s") +
             (coverage.exhaustive ? " (exhaustive)" : " (sampled)"));
    return out;
}

// ---------------------------------------------------------------------------
// Pair file I/O

std::string pair_to_json(const HhpdaPair& pair) {
    nlohmann::ordered_json j;
    j["params"] = {{"K1", pair.p.k1},     {"K2", pair.p.k2},         {"Kprime", pair.p.kprime},
                   {"F", pair.p.f},       {"Fprime", pair.p.fprime}, {"Z1", pair.p.z1},
                   {"Z2", pair.p.z2},     {"Zprime", pair.p.zprime}};
    j["Q0"] = detail::grid_to_json(pair.q0);
    nlohmann::ordered_json grids = nlohmann::ordered_json::array();
    for (const auto& g : pair.qsub) grids.push_back(detail::grid_to_json(g));
    j["Q"] = std::move(grids);
    j["B"] = detail::grid_to_json(pair.b);
    j["S"] = pair.s_labels;
    j["S_k"] = pair.sk_labels;
    if (pair.provenance) {
        const Provenance& prov = *pair.provenance;
        nlohmann::ordered_json pj;
        pj["design_id"] = prov.design_id;
        pj["design"] = {{"t", prov.design.t},
                        {"v", prov.design.v},
                        {"k", prov.design.k},
                        {"lambda", prov.design.lambda},
                        {"blocks", prov.design.blocks}};
        pj["K2"] = prov.k2;
        pj["a"] = prov.a;
        pj["mirror_groups"] = prov.mirror_groups;
        j["provenance"] = std::move(pj);
    } else {
        j["provenance"] = nullptr;
    }
    return j.dump(2) + "\n";
}

HhpdaPair pair_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("pair: invalid JSON: ") + e.what());
    }
    HhpdaPair pair;
    try {
        const auto& pj = j.at("params");
        pair.p.k1 = pj.at("K1").get<int>();
        pair.p.k2 = pj.at("K2").get<int>();
        pair.p.kprime = pj.at("Kprime").get<int>();
        pair.p.f = pj.at("F").get<int>();
        pair.p.fprime = pj.at("Fprime").get<int>();
        pair.p.z1 = pj.at("Z1").get<int>();
        pair.p.z2 = pj.at("Z2").get<int>();
        pair.p.zprime = pj.at("Zprime").get<int>();
        pair.q0 = detail::grid_from_json(j.at("Q0"), "pair: Q0");
        const auto& grids = j.at("Q");
        if (!grids.is_array() || static_cast<int>(grids.size()) != pair.p.k1)
            throw parse_error("pair: Q must list one grid per mirror (" +
                              std::to_string(pair.p.k1) + ")");
        for (int k1 = 1; k1 <= pair.p.k1; ++k1)
            pair.qsub.push_back(
                detail::grid_from_json(grids[k1 - 1], "pair: Q[" + std::to_string(k1) + "]"));
        pair.b = detail::grid_from_json(j.at("B"), "pair: B");
        pair.s_labels = j.at("S").get<std::vector<int>>();
        pair.sk_labels = j.at("S_k").get<std::vector<std::vector<int>>>();
        if (j.contains("provenance") && !j.at("provenance").is_null()) {
            const auto& pv = j.at("provenance");
            Provenance prov;
            prov.design_id = pv.value("design_id", std::string{});
            const auto& dj = pv.at("design");
            prov.design.t = dj.at("t").get<int>();
            prov.design.v = dj.at("v").get<int>();
            prov.design.k = dj.at("k").get<int>();
            prov.design.lambda = dj.at("lambda").get<int>();
            prov.design.blocks = dj.at("blocks").get<std::vector<std::vector<int>>>();
            prov.k2 = pv.at("K2").get<int>();
            prov.a = pv.at("a").get<std::vector<int>>();
            prov.mirror_groups = pv.at("mirror_groups").get<std::vector<std::vector<int>>>();
            pair.provenance = std::move(prov);
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("pair: missing or mistyped field: ") + e.what());
    }

    // Schema-level checks only; verify_hhpda owns the full conditions.
    std::sort(pair.s_labels.begin(), pair.s_labels.end());
    std::set<int> all(pair.s_labels.begin(), pair.s_labels.end());
    if (static_cast<int>(pair.sk_labels.size()) != pair.p.k1)
        throw parse_error("pair: S_k must list one label set per mirror");
    for (auto& sk : pair.sk_labels) {
        std::sort(sk.begin(), sk.end());
        for (int label : sk)
            if (!all.insert(label).second)
                throw parse_error("pair: label " + std::to_string(label) +
                                  " appears in two label sets");
    }
    if (pair.provenance && pair.provenance->design.block_count() != pair.p.f)
        throw parse_error("pair: provenance design has " +
                          std::to_string(pair.provenance->design.block_count()) +
                          " blocks, expected F=" + std::to_string(pair.p.f));
    if (pair.provenance && pair.provenance->k2 != pair.p.k2)
        throw parse_error("pair: provenance K2=" + std::to_string(pair.provenance->k2) +
                          " disagrees with params K2=" + std::to_string(pair.p.k2));
    return pair;
}

HhpdaPair load_pair(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("pair: cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return pair_from_json(ss.str());
}

void store_pair(const HhpdaPair& pair, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("pair: cannot write '" + path + "'");
    out << pair_to_json(pair);
}

// ---------------------------------------------------------------------------
// Bundled golden pair

HhpdaPair example_pair() {
    HhpdaPair pair;
    pair.p = {4, 2, 3, 14, 9, 3, 4, 5};

    pair.q0 = PdaArray(14, 4);
    const int q0_star_rows[4][3] = {{1, 2, 3}, {1, 8, 13}, {2, 13, 14}, {3, 8, 14}};
    for (int c = 1; c <= 4; ++c)
        for (int r : q0_star_rows[c - 1]) pair.q0.at(r, c) = Cell::star();

    struct L { int r, c, label; };
    const std::vector<std::vector<L>> labels = {
        {{1, 1, 6}, {1, 2, 7}, {2, 1, 8}, {2, 2, 9}, {3, 1, 10}, {3, 2, 11}},
        {{1, 1, 12}, {1, 2, 13}, {8, 1, 14}, {8, 2, 15}, {13, 1, 16}, {13, 2, 17}},
        {{2, 1, 18}, {2, 2, 19}, {13, 1, 20}, {13, 2, 21}, {14, 1, 22}, {14, 2, 23}},
        {{3, 1, 24}, {3, 2, 25}, {8, 1, 26}, {8, 2, 27}, {14, 1, 28}, {14, 2, 29}}};
    const std::vector<std::vector<std::pair<int, int>>> stars = {
        {{4, 1}, {5, 1}, {6, 1}, {7, 1}, {9, 2}, {10, 2}, {11, 2}, {12, 2}},
        {{4, 1}, {5, 1}, {10, 1}, {11, 1}, {6, 2}, {7, 2}, {9, 2}, {12, 2}},
        {{4, 1}, {6, 1}, {10, 1}, {12, 1}, {5, 2}, {7, 2}, {9, 2}, {11, 2}},
        {{4, 1}, {7, 1}, {11, 1}, {12, 1}, {5, 2}, {6, 2}, {9, 2}, {10, 2}}};
    for (int k1 = 1; k1 <= 4; ++k1) {
        PdaArray grid(14, 2);
        for (const auto& [r, c] : stars[k1 - 1]) grid.at(r, c) = Cell::star();
        std::vector<int> sk;
        for (const L& l : labels[k1 - 1]) {
            grid.at(l.r, l.c) = Cell::label(l.label);
            sk.push_back(l.label);
        }
        pair.qsub.push_back(std::move(grid));
        pair.sk_labels.push_back(std::move(sk));
    }

    pair.b = PdaArray(9, 3);
    const int b_cells[9][3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {0, 0, 2}, {0, 2, 0},
                               {2, 0, 0}, {0, 3, 4}, {3, 0, 5}, {4, 5, 0}};
    for (int r = 1; r <= 9; ++r)
        for (int c = 1; c <= 3; ++c)
            pair.b.at(r, c) = b_cells[r - 1][c - 1] ? Cell::label(b_cells[r - 1][c - 1])
                                                    : Cell::star();
    pair.s_labels = {1, 2, 3, 4, 5};

    Provenance prov;
    prov.design_id = "ex2-3-8-4-1";
    prov.design = load_design("ex2-3-8-4-1");
    prov.k2 = 2;
    prov.a = {1, 2};
    prov.mirror_groups = {{1, 2}, {3, 4}, {5, 6}, {7, 8}};
    pair.provenance = std::move(prov);
    return pair;
}

} // namespace hotcache
