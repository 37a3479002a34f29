#include "hotcache/pda.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <json.hpp>

#include "grid_json.hpp"

namespace hotcache {

namespace {

std::string cell_pos(int r, int c) {
    return "(" + std::to_string(r) + "," + std::to_string(c) + ")";
}

std::string set_str(const std::vector<int>& s) {
    std::string out = "{";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "}";
}

} // namespace

int PdaArray::column_star_count(int c) const {
    int n = 0;
    for (int r = 1; r <= rows; ++r)
        if (at(r, c).is_star()) ++n;
    return n;
}

std::vector<int> PdaArray::star_rows(int c) const {
    std::vector<int> out;
    for (int r = 1; r <= rows; ++r)
        if (at(r, c).is_star()) out.push_back(r);
    return out;
}

std::vector<int> PdaArray::labels() const {
    std::set<int> s;
    for (const Cell& c : cells)
        if (c.is_label()) s.insert(c.label_value());
    return {s.begin(), s.end()};
}

int PdaArray::label_occurrences(int label) const {
    int n = 0;
    for (const Cell& c : cells)
        if (c.is_label() && c.label_value() == label) ++n;
    return n;
}

PdaCheck verify_pda(const PdaArray& arr) {
    PdaCheck out;
    out.cols = arr.cols;
    out.rows = arr.rows;
    Verdict& v = out.verdict;

    if (arr.rows < 1 || arr.cols < 1) {
        v.fail("array is empty");
        return out;
    }
    for (int r = 1; r <= arr.rows; ++r)
        for (int c = 1; c <= arr.cols; ++c)
            if (arr.at(r, c).is_null())
                v.fail("cell " + cell_pos(r, c) +
                       " is null; a PDA holds only stars and integers");

    out.stars = arr.column_star_count(1);
    for (int c = 2; c <= arr.cols; ++c) {
        int z = arr.column_star_count(c);
        if (z != out.stars)
            v.fail("C1: column " + std::to_string(c) + " has " + std::to_string(z) +
                   " stars, column 1 has " + std::to_string(out.stars));
    }

    const std::vector<int> present = arr.labels();
    out.label_count = present.empty() ? 0 : present.back();
    for (int s = 1, i = 0; s <= out.label_count; ++s) {
        if (i < static_cast<int>(present.size()) && present[i] == s) {
            ++i;
            continue;
        }
        v.fail("C2: integer " + std::to_string(s) + " never occurs (labels run up to " +
               std::to_string(out.label_count) + ")");
    }

    // C3: equal integers pairwise in distinct rows and columns, stars at
    // the two cross positions.
    std::map<int, std::vector<std::pair<int, int>>> where;
    for (int r = 1; r <= arr.rows; ++r)
        for (int c = 1; c <= arr.cols; ++c)
            if (arr.at(r, c).is_label()) where[arr.at(r, c).label_value()].push_back({r, c});
    for (const auto& [label, cells] : where) {
        for (size_t i = 0; i < cells.size(); ++i) {
            for (size_t j = i + 1; j < cells.size(); ++j) {
                auto [r1, c1] = cells[i];
                auto [r2, c2] = cells[j];
                if (r1 == r2 || c1 == c2) {
                    v.fail("C3: integer " + std::to_string(label) + " at " + cell_pos(r1, c1) +
                           " and " + cell_pos(r2, c2) + " shares a row or column");
                    continue;
                }
                if (!arr.at(r1, c2).is_star() || !arr.at(r2, c1).is_star())
                    v.fail("C3: integer " + std::to_string(label) + " at " + cell_pos(r1, c1) +
                           " and " + cell_pos(r2, c2) + " lacks stars at the cross positions");
            }
        }
    }
    return out;
}

std::vector<BRowId> b_row_ids(int t, const std::vector<int>& a) {
    if (t < 2) throw param_error("inner array: t must be at least 2");
    if (static_cast<int>(a.size()) != t - 1)
        throw param_error("inner array: expected " + std::to_string(t - 1) +
                          " multiplicities a_1..a_" + std::to_string(t - 1) + ", got " +
                          std::to_string(a.size()));
    long long total = 0;
    for (int s = 1; s <= t - 1; ++s) {
        if (a[s - 1] < 0) throw param_error("inner array: a_" + std::to_string(s) + " is negative");
        total += static_cast<long long>(a[s - 1]) * binom(t, s);
    }
    if (total == 0) throw param_error("inner array: all multiplicities are zero");

    std::vector<BRowId> rows;
    for (int s = t - 1; s >= 1; --s) {
        for (int i = 1; i <= a[s - 1]; ++i)
            for_each_subset(t, s, [&](const std::vector<int>& y) { rows.push_back({y, i}); });
    }
    return rows;
}

PdaArray build_b_array(int t, const std::vector<int>& a) {
    const std::vector<BRowId> rows = b_row_ids(t, a);

    // Canonical label numbering: (|Y'| descending, Y' lexicographic, i
    // ascending) mapped to 1, 2, 3, ...
    std::map<std::pair<std::vector<int>, int>, int> label_of;
    int next = 1;
    for (int size = t; size >= 2; --size) {
        const int s = size - 1; // label (Y', i) stems from rows with |Y| = s
        if (a[s - 1] <= 0) continue;
        for_each_subset(t, size, [&](const std::vector<int>& yp) {
            for (int i = 1; i <= a[s - 1]; ++i) label_of[{yp, i}] = next++;
        });
    }

    PdaArray b(static_cast<int>(rows.size()), t);
    for (int r = 1; r <= b.rows; ++r) {
        const BRowId& id = rows[r - 1];
        for (int j = 1; j <= t; ++j) {
            if (std::binary_search(id.subset.begin(), id.subset.end(), j)) {
                b.at(r, j) = Cell::star();
            } else {
                std::vector<int> yp = id.subset;
                yp.insert(std::lower_bound(yp.begin(), yp.end(), j), j);
                b.at(r, j) = Cell::label(label_of.at({yp, id.copy}));
            }
        }
    }
    return b;
}

std::optional<std::vector<int>> find_row_assignment(
    const PdaArray& host, const PdaArray& pattern,
    const std::vector<std::vector<int>>* candidate_order) {
    if (host.cols != pattern.cols)
        throw param_error("find_row_assignment: host has " + std::to_string(host.cols) +
                          " columns, pattern has " + std::to_string(pattern.cols));

    auto star_key = [](const PdaArray& arr, int r) {
        std::vector<int> key;
        for (int c = 1; c <= arr.cols; ++c)
            if (arr.at(r, c).is_star()) key.push_back(c);
        return key;
    };

    std::vector<std::vector<int>> host_keys(host.rows);
    for (int r = 1; r <= host.rows; ++r) host_keys[r - 1] = star_key(host, r);

    // Candidate host rows per pattern row: exact star-set equality.
    std::vector<std::vector<int>> cand(pattern.rows);
    for (int r = 1; r <= pattern.rows; ++r) {
        const std::vector<int> key = star_key(pattern, r);
        if (candidate_order) {
            for (int h : (*candidate_order)[r - 1])
                if (host_keys[h - 1] == key) cand[r - 1].push_back(h);
        } else {
            for (int h = 1; h <= host.rows; ++h)
                if (host_keys[h - 1] == key) cand[r - 1].push_back(h);
        }
    }

    // Kuhn's augmenting paths over the compatibility graph.
    std::vector<int> host_match(host.rows + 1, 0); // host row -> pattern row
    std::vector<int> row_match(pattern.rows, 0);   // pattern row -> host row
    std::vector<char> visited(host.rows + 1, 0);

    // Free candidates first, displacement only when none is left; keeps
    // the assignment at the candidate order's first fit when one exists.
    std::function<bool(int)> augment = [&](int pr) -> bool {
        for (int h : cand[pr - 1]) {
            if (!visited[h] && host_match[h] == 0) {
                visited[h] = 1;
                host_match[h] = pr;
                row_match[pr - 1] = h;
                return true;
            }
        }
        for (int h : cand[pr - 1]) {
            if (visited[h]) continue;
            visited[h] = 1;
            if (augment(host_match[h])) {
                host_match[h] = pr;
                row_match[pr - 1] = h;
                return true;
            }
        }
        return false;
    };

    for (int pr = 1; pr <= pattern.rows; ++pr) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!augment(pr)) return std::nullopt;
    }
    return row_match;
}

Verdict verify_hppda(const PdaArray& host, const PdaArray& inner) {
    if (inner.cols > host.cols)
        throw param_error("verify_hppda: inner array has more columns (" +
                          std::to_string(inner.cols) + ") than the host (" +
                          std::to_string(host.cols) + ")");
    Verdict out;

    for (int r = 1; r <= host.rows; ++r)
        for (int c = 1; c <= host.cols; ++c)
            if (host.at(r, c).is_label())
                out.fail("host cell " + cell_pos(r, c) + " holds an integer; expected star/null");

    const int z = host.rows ? host.column_star_count(1) : 0;
    for (int c = 2; c <= host.cols; ++c) {
        int zc = host.column_star_count(c);
        if (zc != z)
            out.fail("host column " + std::to_string(c) + " has " + std::to_string(zc) +
                     " stars, column 1 has " + std::to_string(z));
    }

    PdaCheck bc = verify_pda(inner);
    for (const auto& msg : bc.verdict.violations) out.fail("inner array: " + msg);
    out.note("host stars per column Z=" + std::to_string(z) + ", inner stars per column Z'=" +
             std::to_string(bc.stars));
    if (!out.ok()) return out;

    for_each_subset(host.cols, inner.cols, [&](const std::vector<int>& tau) {
        PdaArray sub(host.rows, inner.cols);
        for (int r = 1; r <= host.rows; ++r)
            for (int c = 1; c <= inner.cols; ++c) sub.at(r, c) = host.at(r, tau[c - 1]);
        if (!find_row_assignment(sub, inner))
            out.fail("no row assignment star-matches the inner array for columns " +
                     set_str(tau));
    });
    return out;
}

std::string array_to_json(const PdaArray& arr) {
    return detail::grid_to_json(arr).dump() + "\n";
}

PdaArray array_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("array: invalid JSON: ") + e.what());
    }
    return detail::grid_from_json(j, "array");
}

} // namespace hotcache
