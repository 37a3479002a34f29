/*
 * pda.hpp: star/null/integer arrays, the placement-delivery-array
 * verifier, the inner-array builder, and the star-pattern row matcher.
 */
#ifndef HOTCACHE_PDA_HPP
#define HOTCACHE_PDA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hotcache/common.hpp"

namespace hotcache {

// One array cell: star, null, or a positive integer label.
class Cell {
  public:
    constexpr Cell() = default;

    static constexpr Cell star() { return Cell(-1); }
    static constexpr Cell null() { return Cell(0); }
    static Cell label(int value) {
        if (value <= 0) throw param_error("Cell: labels must be positive");
        return Cell(value);
    }

    constexpr bool is_star() const { return v_ == -1; }
    constexpr bool is_null() const { return v_ == 0; }
    constexpr bool is_label() const { return v_ > 0; }
    constexpr int label_value() const { return v_; }

    friend constexpr bool operator==(Cell a, Cell b) { return a.v_ == b.v_; }

  private:
    explicit constexpr Cell(std::int32_t v) : v_(v) {}
    std::int32_t v_ = 0;
};

// Row-major grid of cells; at() is 1-based to match the block/row
// numbering used throughout.
struct PdaArray {
    int rows = 0;
    int cols = 0;
    std::vector<Cell> cells;

    PdaArray() = default;
    PdaArray(int r, int c) : rows(r), cols(c), cells(static_cast<size_t>(r) * c, Cell::null()) {}

    Cell& at(int r, int c) { return cells[static_cast<size_t>(r - 1) * cols + (c - 1)]; }
    Cell at(int r, int c) const { return cells[static_cast<size_t>(r - 1) * cols + (c - 1)]; }

    int column_star_count(int c) const;
    std::vector<int> star_rows(int c) const;       // 1-based rows with a star in column c
    std::vector<int> labels() const;               // sorted distinct labels
    int label_occurrences(int label) const;

    friend bool operator==(const PdaArray&, const PdaArray&) = default;
};

// Result of verify_pda: the extracted parameters are meaningful only when
// the verdict passes.
struct PdaCheck {
    Verdict verdict;
    int cols = 0;     // K
    int rows = 0;     // F
    int stars = 0;    // Z, stars per column
    int label_count = 0;
};

// Checks the three defining conditions: constant per-column star count,
// labels forming a gap-free 1..S each occurring at least once, and equal
// labels in distinct rows/columns with stars at the cross positions.
// Null cells are violations; the array must consist of stars and labels.
PdaCheck verify_pda(const PdaArray& arr);

// Inner array over row multiplicities a = (a_1, ..., a_{t-1}): rows are
// (Y, i) with Y a nonempty proper subset of [t], |Y| = s, i in [a_s],
// ordered by (s descending, i ascending, Y lexicographic); the cell in
// column j holds a star when j is in Y and the label (Y ∪ {j}, i)
// otherwise. Set labels are numbered 1.. in (size descending, set
// lexicographic, i ascending) order.
PdaArray build_b_array(int t, const std::vector<int>& a);

// The (Y, i) row identities of build_b_array's output, in row order.
struct BRowId {
    std::vector<int> subset; // Y, sorted
    int copy = 0;            // i
};
std::vector<BRowId> b_row_ids(int t, const std::vector<int>& a);

// Injective assignment of pattern rows to host rows with identical star
// positions (exact set equality per row), via augmenting-path matching.
// Returns one 1-based host row per pattern row, or nullopt. Host and
// pattern must have the same column count. candidate_order, when given,
// supplies the 1-based host rows to try for each pattern row, in
// preference order; by default all host rows are tried in ascending order.
std::optional<std::vector<int>> find_row_assignment(
    const PdaArray& host, const PdaArray& pattern,
    const std::vector<std::vector<int>>* candidate_order = nullptr);

// Hotplug pair check: every host column carries the same star count, the
// inner array is a PDA, and every choice of pattern-width columns of the
// host admits a row assignment.
Verdict verify_hppda(const PdaArray& host, const PdaArray& inner);

// Grid JSON ("*" = star, null = null, positive int = label).
std::string array_to_json(const PdaArray& arr);
PdaArray array_from_json(const std::string& text);

} // namespace hotcache

#endif
