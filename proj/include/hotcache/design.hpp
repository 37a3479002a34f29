/*
 * design.hpp: t-(v,k,lambda) designs: representation, verification,
 * block counting, the complete-design generator and file/catalog I/O.
 *
 * Points are 1-based. Block order is significant: it indexes the rows of
 * the arrays built from a design, so loaders and the catalog preserve it.
 */
#ifndef HOTCACHE_DESIGN_HPP
#define HOTCACHE_DESIGN_HPP

#include <string>
#include <vector>

#include "hotcache/common.hpp"

namespace hotcache {

struct TDesign {
    int t = 0;
    int v = 0;
    int k = 0;
    int lambda = 0;
    std::vector<std::vector<int>> blocks; // each strictly increasing, points in [1, v]

    int block_count() const { return static_cast<int>(blocks.size()); }
};

// Checks every defining property; repeated blocks are reported as a
// warning (the array construction separately rejects them).
Verdict verify_design(const TDesign& d);

// lambda_s = lambda * C(v-s, t-s) / C(k-s, t-s), the number of blocks
// through any fixed s points (0 <= s <= t). Throws if the division is not
// exact, which would mean the parameters are inconsistent.
long long lambda_s(const TDesign& d, int s);

// Number of blocks containing every point of `contain` and none of
// `avoid`, by direct scan. This is the oracle the construction trusts.
long long count_containing_avoiding(const TDesign& d, const std::vector<int>& contain,
                                    const std::vector<int>& avoid);

// Blocks containing s fixed points of a t-set and avoiding the other
// t-s; constant over the choice of points for a valid design. This bounds
// the row multiplicities a_s of the inner array.
long long lambda_s_within_t(const TDesign& d, int s);

// All C(v,k) k-subsets of [v] in lexicographic order; lambda = C(v-t, k-t).
TDesign complete_design(int v, int k, int t);

struct CatalogEntry {
    std::string id;
    std::string note;
    TDesign design;
};

const std::vector<CatalogEntry>& design_catalog();

// Accepts a catalog id or a path to a design JSON file.
TDesign load_design(const std::string& source);
void store_design(const TDesign& d, const std::string& path);

std::string design_to_json(const TDesign& d);
TDesign design_from_json(const std::string& text);

} // namespace hotcache

#endif
