#include "hotcache/design.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hotcache {

namespace {

std::string block_str(const std::vector<int>& block) {
    std::string s = "{";
    for (size_t i = 0; i < block.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(block[i]);
    }
    return s + "}";
}

bool contains_all(const std::vector<int>& block, const std::vector<int>& pts) {
    // both sides sorted
    return std::includes(block.begin(), block.end(), pts.begin(), pts.end());
}

bool contains_any(const std::vector<int>& block, const std::vector<int>& pts) {
    for (int p : pts)
        if (std::binary_search(block.begin(), block.end(), p)) return true;
    return false;
}

} // namespace

Verdict verify_design(const TDesign& d) {
    Verdict out;
    if (!(d.v > d.k && d.k >= d.t && d.t >= 1)) {
        out.fail("parameters must satisfy v > k >= t >= 1, got t=" + std::to_string(d.t) +
                 " v=" + std::to_string(d.v) + " k=" + std::to_string(d.k));
        return out;
    }
    if (d.lambda < 1) out.fail("lambda must be positive");
    if (d.blocks.empty()) out.fail("design has no blocks");

    for (int bi = 0; bi < d.block_count(); ++bi) {
        const auto& b = d.blocks[bi];
        if (static_cast<int>(b.size()) != d.k) {
            out.fail("block " + std::to_string(bi + 1) + " " + block_str(b) + " has " +
                     std::to_string(b.size()) + " points, expected k=" + std::to_string(d.k));
            continue;
        }
        for (size_t i = 0; i < b.size(); ++i) {
            if (b[i] < 1 || b[i] > d.v)
                out.fail("block " + std::to_string(bi + 1) + " has point " +
                         std::to_string(b[i]) + " outside [1, " + std::to_string(d.v) + "]");
            if (i > 0 && b[i] <= b[i - 1])
                out.fail("block " + std::to_string(bi + 1) + " " + block_str(b) +
                         " is not strictly increasing");
        }
    }
    if (!out.ok()) return out;

    std::map<std::vector<int>, int> seen;
    for (const auto& b : d.blocks)
        if (++seen[b] == 2) out.warn("block " + block_str(b) + " is repeated");

    for_each_subset(d.v, d.t, [&](const std::vector<int>& tset) {
        long long c = 0;
        for (const auto& b : d.blocks)
            if (contains_all(b, tset)) ++c;
        if (c != d.lambda)
            out.fail("t-subset " + block_str(tset) + " lies in " + std::to_string(c) +
                     " blocks, expected lambda=" + std::to_string(d.lambda));
    });
    return out;
}

long long lambda_s(const TDesign& d, int s) {
    if (s < 0 || s > d.t)
        throw param_error("lambda_s: s=" + std::to_string(s) + " outside [0, t=" +
                          std::to_string(d.t) + "]");
    const long long num = d.lambda * binom(d.v - s, d.t - s);
    const long long den = binom(d.k - s, d.t - s);
    if (den == 0 || num % den != 0)
        throw param_error("lambda_s: lambda*C(v-s,t-s) not divisible by C(k-s,t-s)");
    return num / den;
}

long long count_containing_avoiding(const TDesign& d, const std::vector<int>& contain,
                                    const std::vector<int>& avoid) {
    std::vector<int> c = contain, a = avoid;
    std::sort(c.begin(), c.end());
    std::sort(a.begin(), a.end());
    for (int p : c)
        if (std::binary_search(a.begin(), a.end(), p))
            throw param_error("count_containing_avoiding: point " + std::to_string(p) +
                              " appears in both contain and avoid");
    long long n = 0;
    for (const auto& b : d.blocks)
        if (contains_all(b, c) && !contains_any(b, a)) ++n;
    return n;
}

long long lambda_s_within_t(const TDesign& d, int s) {
    if (s < 1 || s > d.t)
        throw param_error("lambda_s_within_t: s=" + std::to_string(s) + " outside [1, t=" +
                          std::to_string(d.t) + "]");
    std::vector<int> contain, avoid;
    for (int p = 1; p <= s; ++p) contain.push_back(p);
    for (int p = s + 1; p <= d.t; ++p) avoid.push_back(p);
    return count_containing_avoiding(d, contain, avoid);
}

TDesign complete_design(int v, int k, int t) {
    if (!(v > k && k >= t && t >= 1))
        throw param_error("complete_design: need v > k >= t >= 1, got v=" + std::to_string(v) +
                          " k=" + std::to_string(k) + " t=" + std::to_string(t));
    TDesign d;
    d.t = t;
    d.v = v;
    d.k = k;
    d.lambda = static_cast<int>(binom(v - t, k - t));
    for_each_subset(v, k, [&](const std::vector<int>& block) { d.blocks.push_back(block); });
    return d;
}

const std::vector<CatalogEntry>& design_catalog() {
    static const std::vector<CatalogEntry> catalog = [] {
        std::vector<CatalogEntry> c;

        // 2-(10,4,2); source lists points 0..9, shifted here to 1..10.
        TDesign ex1{2, 10, 4, 2,
                    {{1, 2, 3, 4}, {1, 2, 5, 6}, {1, 3, 5, 7}, {1, 4, 8, 9}, {1, 6, 8, 10},
                     {1, 7, 9, 10}, {2, 3, 8, 9}, {2, 4, 7, 10}, {2, 5, 8, 10}, {2, 6, 7, 9},
                     {3, 4, 6, 10}, {3, 5, 9, 10}, {3, 6, 7, 8}, {4, 5, 6, 9}, {4, 5, 7, 8}}};
        c.push_back({"ex1-2-10-4-2", "points shifted from 0..9 to 1..10", std::move(ex1)});

        // 3-(8,4,1); block order fixed, it indexes array rows.
        TDesign ex2{3, 8, 4, 1,
                    {{1, 2, 3, 4}, {1, 2, 5, 6}, {1, 2, 7, 8}, {1, 3, 5, 7}, {1, 3, 6, 8},
                     {1, 4, 5, 8}, {1, 4, 6, 7}, {3, 4, 7, 8}, {2, 4, 6, 8}, {2, 3, 5, 8},
                     {2, 3, 6, 7}, {2, 4, 5, 7}, {3, 4, 5, 6}, {5, 6, 7, 8}}};
        c.push_back({"ex2-3-8-4-1", "row order fixed by the source listing", std::move(ex2)});

        return c;
    }();
    return catalog;
}

std::string design_to_json(const TDesign& d) {
    nlohmann::ordered_json j;
    j["t"] = d.t;
    j["v"] = d.v;
    j["k"] = d.k;
    j["lambda"] = d.lambda;
    j["blocks"] = d.blocks;
    return j.dump(2) + "\n";
}

TDesign design_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("design: invalid JSON: ") + e.what());
    }
    TDesign d;
    try {
        d.t = j.at("t").get<int>();
        d.v = j.at("v").get<int>();
        d.k = j.at("k").get<int>();
        d.lambda = j.at("lambda").get<int>();
        d.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("design: missing or mistyped field: ") + e.what());
    }
    for (size_t i = 0; i < d.blocks.size(); ++i) {
        const auto& b = d.blocks[i];
        if (static_cast<int>(b.size()) != d.k)
            throw parse_error("design: block " + std::to_string(i + 1) + " " + block_str(b) +
                              " has " + std::to_string(b.size()) + " points, expected k=" +
                              std::to_string(d.k));
        for (size_t p = 0; p < b.size(); ++p) {
            if (b[p] < 1 || b[p] > d.v)
                throw parse_error("design: block " + std::to_string(i + 1) + " point " +
                                  std::to_string(b[p]) + " outside [1, " + std::to_string(d.v) +
                                  "]");
            if (p > 0 && b[p] <= b[p - 1])
                throw parse_error("design: block " + std::to_string(i + 1) + " " + block_str(b) +
                                  " is not strictly increasing");
        }
    }
    return d;
}

TDesign load_design(const std::string& source) {
    for (const auto& entry : design_catalog())
        if (entry.id == source) return entry.design;
    std::ifstream in(source);
    if (!in)
        throw parse_error("design: '" + source + "' is neither a catalog id nor a readable file");
    std::stringstream ss;
    ss << in.rdbuf();
    return design_from_json(ss.str());
}

void store_design(const TDesign& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("design: cannot write '" + path + "'");
    out << design_to_json(d);
}

} // namespace hotcache
