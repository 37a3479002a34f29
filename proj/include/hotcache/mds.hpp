/*
 * mds.hpp: [n, k] erasure code over GF(2^8). The generator is a k x n
 * Vandermonde matrix on the first n field elements (column j holds the
 * powers of the byte j-1), so any k columns are invertible and coded
 * output is bit-reproducible across runs and platforms.
 */
#ifndef HOTCACHE_MDS_HPP
#define HOTCACHE_MDS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "hotcache/common.hpp"

namespace hotcache {

// One fixed-length packet of field symbols (bytes).
using Packet = std::vector<std::uint8_t>;

// A coded share: 1-based coded index in [1, n] plus its payload.
struct Share {
    int index = 0;
    Packet data;
};

class GeneratorMatrix {
  public:
    GeneratorMatrix() = default;
    GeneratorMatrix(int n_total, int k_info);

    int n() const { return n_; }
    int k() const { return k_; }

    // row in [0, k), col in [0, n)
    std::uint8_t at(int row, int col) const { return entries_[row * n_ + col]; }

  private:
    int n_ = 0, k_ = 0;
    std::vector<std::uint8_t> entries_;
};

// Deterministic [n, k] generator; 1 <= k <= n <= 256.
GeneratorMatrix mds_generator(int n_total, int k_info);

// info holds exactly k packets of equal length; returns n coded packets.
std::vector<Packet> mds_encode(const GeneratorMatrix& g, const std::vector<Packet>& info);

// Recovers the k information packets from any k shares with distinct
// indices, then checks every provided share against the re-encoding.
std::vector<Packet> mds_decode(const GeneratorMatrix& g, const std::vector<Share>& shares);

} // namespace hotcache

#endif
