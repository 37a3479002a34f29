/*
 * grid_json.hpp: internal cell-grid <-> JSON value conversion shared by
 * the array and pair loaders. Cells encode as "*", null, or a positive
 * integer.
 */
#ifndef HOTCACHE_GRID_JSON_HPP
#define HOTCACHE_GRID_JSON_HPP

#include <string>

#include <json.hpp>

#include "hotcache/pda.hpp"

namespace hotcache::detail {

inline nlohmann::ordered_json grid_to_json(const PdaArray& arr) {
    nlohmann::ordered_json grid = nlohmann::ordered_json::array();
    for (int r = 1; r <= arr.rows; ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int c = 1; c <= arr.cols; ++c) {
            const Cell cell = arr.at(r, c);
            if (cell.is_star())
                row.push_back("*");
            else if (cell.is_null())
                row.push_back(nullptr);
            else
                row.push_back(cell.label_value());
        }
        grid.push_back(std::move(row));
    }
    return grid;
}

inline PdaArray grid_from_json(const nlohmann::json& grid, const std::string& what) {
    if (!grid.is_array() || grid.empty() || !grid[0].is_array())
        throw parse_error(what + ": expected a non-empty array of rows");
    PdaArray arr(static_cast<int>(grid.size()), static_cast<int>(grid[0].size()));
    for (int r = 1; r <= arr.rows; ++r) {
        const auto& row = grid[r - 1];
        if (!row.is_array() || static_cast<int>(row.size()) != arr.cols)
            throw parse_error(what + ": row " + std::to_string(r) + " has " +
                              std::to_string(row.size()) + " cells, expected " +
                              std::to_string(arr.cols));
        for (int c = 1; c <= arr.cols; ++c) {
            const auto& cell = row[c - 1];
            if (cell.is_null())
                arr.at(r, c) = Cell::null();
            else if (cell.is_string() && cell.get<std::string>() == "*")
                arr.at(r, c) = Cell::star();
            else if (cell.is_number_integer() && cell.get<int>() > 0)
                arr.at(r, c) = Cell::label(cell.get<int>());
            else
                throw parse_error(what + ": cell (" + std::to_string(r) + "," +
                                  std::to_string(c) + ") must be \"*\", null or a positive integer");
        }
    }
    return arr;
}

} // namespace hotcache::detail

#endif
