/*
 * hhpda.hpp: the hierarchical hotplug array pair: full verifier, the
 * t-design construction with its parameter arithmetic, the projection
 * onto an active user set, the row-set finder and the delivery-array
 * filler, plus pair file I/O.
 *
 * A pair couples Q = (Q0, Q1..QK1) with an inner array B. Q0 (F x K1,
 * star/null) drives mirror caching; each Qk1 (F x K2, star/null/label)
 * drives the caches and local deliveries of mirror k1's users; B is a
 * PDA that every projection onto K' active users must star-match.
 */
#ifndef HOTCACHE_HHPDA_HPP
#define HOTCACHE_HHPDA_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hotcache/common.hpp"
#include "hotcache/design.hpp"
#include "hotcache/pda.hpp"

namespace hotcache {

// One user addressed as (mirror, slot), both 1-based.
struct UserId {
    int k1 = 0;
    int k2 = 0;

    friend auto operator<=>(const UserId&, const UserId&) = default;
};

struct HhpdaParams {
    int k1 = 0;     // mirrors
    int k2 = 0;     // users per mirror
    int kprime = 0; // active users per session
    int f = 0;      // coded packets per file (rows of Q)
    int fprime = 0; // information packets per file (rows of B)
    int z1 = 0;     // stars per Q0 column
    int z2 = 0;     // stars per Qk1 column
    int zprime = 0; // stars per B column

    friend bool operator==(const HhpdaParams&, const HhpdaParams&) = default;
};

// Construction inputs kept alongside a built pair; enables the fast
// candidate-counting row-set finder.
struct Provenance {
    std::string design_id; // may be empty for ad-hoc designs
    TDesign design;        // rows of Q follow this block order
    int k2 = 0;
    std::vector<int> a;
    std::vector<std::vector<int>> mirror_groups; // D_1..D_K1

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct HhpdaPair {
    HhpdaParams p;
    PdaArray q0;                               // F x K1, star/null
    std::vector<PdaArray> qsub;                // K1 grids, F x K2
    PdaArray b;                                // F' x K'
    std::vector<int> s_labels;                 // sorted
    std::vector<std::vector<int>> sk_labels;   // per mirror, sorted
    std::optional<Provenance> provenance;

    const PdaArray& mirror_grid(int k1) const { return qsub[k1 - 1]; }

    // All K1*K2 users in lexicographic order.
    std::vector<UserId> all_users() const;

    bool same_arrays(const HhpdaPair& other) const {
        return p == other.p && q0 == other.q0 && qsub == other.qsub && b == other.b &&
               s_labels == other.s_labels && sk_labels == other.sk_labels;
    }
};

struct ParamRecord {
    HhpdaParams p;
    int s_size = 0;  // labels of B
    int sk_size = 0; // labels per mirror
    Ratio m1_over_n; // Z1/F'
    Ratio m2_over_n; // Z2/F'
    Ratio server_load; // |S|/F'
};

enum class ZetaStrategy { PreferMirrorStar, AvoidMirrorStar, FirstFit };

std::string to_string(ZetaStrategy s);
ZetaStrategy zeta_strategy_from_string(const std::string& name);

// How many active-user sets the verifier scans.
struct Coverage {
    bool exhaustive = true;
    int samples = 0;
    std::uint64_t seed = 0;

    static Coverage all() { return {true, 0, 0}; }
    static Coverage sample(int n, std::uint64_t seed) { return {false, n, seed}; }
};

// Builds the pair from a design with non-repeated blocks, mirror-group
// size k2 (which must divide v and be smaller than the design strength)
// and inner-array multiplicities a (bounded by the within-t block counts,
// with enough rows to exceed the per-point block count).
HhpdaPair build_from_design(const TDesign& d, int k2, const std::vector<int>& a);

// Closed-form parameters of the same construction.
ParamRecord construction_params(const TDesign& d, int k2, const std::vector<int>& a);

// Checks every structural condition, B as a PDA, and, when the
// structure holds, the row-assignment condition for each active set
// under the requested coverage.
Verdict verify_hhpda(const HhpdaPair& pair, const Coverage& coverage);

// Star/null projection: cell (r, u) is a star when either Q0 or the
// user's own grid holds a star in row zeta[r]. Columns follow tau's
// lexicographic order.
PdaArray project_subarray(const HhpdaPair& pair, const std::vector<int>& zeta_rows,
                          const std::vector<UserId>& tau);

// Projection of all F rows onto all users.
PdaArray projection_host(const HhpdaPair& pair);

// Ordered row set (one Q row per B row, 1-based) whose projection
// star-matches B. Design-backed pairs use candidate counting over the
// blocks; others fall back to strategy-ordered matching.
std::vector<int> find_zeta(const HhpdaPair& pair, const std::vector<UserId>& tau,
                           ZetaStrategy strategy);

// Checks the star match and fills B's integers into the projection's
// nulls; the result equals B cell for cell.
PdaArray fill_qbar(const HhpdaPair& pair, const std::vector<int>& zeta,
                   const std::vector<UserId>& tau);

HhpdaPair load_pair(const std::string& path);
void store_pair(const HhpdaPair& pair, const std::string& path);
std::string pair_to_json(const HhpdaPair& pair);
HhpdaPair pair_from_json(const std::string& text);

// The bundled golden pair: 4 mirrors of 2 users, 14 x 9, loads driven by
// a 9 x 3 inner array. Matches the construction on the "ex2-3-8-4-1"
// catalog design with k2 = 2, a = (1, 2).
HhpdaPair example_pair();

} // namespace hotcache

#endif
