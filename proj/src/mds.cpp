#include "hotcache/mds.hpp"

#include <algorithm>
#include <string>

#include "hotcache/gf256.hpp"

namespace hotcache {

GeneratorMatrix::GeneratorMatrix(int n_total, int k_info) : n_(n_total), k_(k_info) {
    entries_.resize(static_cast<size_t>(n_) * k_);
    for (int j = 0; j < n_; ++j) {
        auto point = static_cast<std::uint8_t>(j);
        std::uint8_t p = 1;
        for (int i = 0; i < k_; ++i) {
            entries_[i * n_ + j] = p;
            p = gf::mul(p, point);
        }
    }
}

GeneratorMatrix mds_generator(int n_total, int k_info) {
    if (k_info < 1 || n_total < k_info)
        throw param_error("mds_generator: need 1 <= k <= n, got n=" + std::to_string(n_total) +
                          " k=" + std::to_string(k_info));
    if (n_total > 256)
        throw param_error("mds_generator: n=" + std::to_string(n_total) +
                          " exceeds the 256 distinct points of GF(2^8)");
    return GeneratorMatrix(n_total, k_info);
}

std::vector<Packet> mds_encode(const GeneratorMatrix& g, const std::vector<Packet>& info) {
    if (static_cast<int>(info.size()) != g.k())
        throw param_error("mds_encode: expected " + std::to_string(g.k()) + " packets, got " +
                          std::to_string(info.size()));
    const size_t len = info.empty() ? 0 : info[0].size();
    for (const auto& p : info)
        if (p.size() != len) throw param_error("mds_encode: packets differ in length");

    std::vector<Packet> coded(g.n(), Packet(len, 0));
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.k(); ++i) {
            const std::uint8_t c = g.at(i, j);
            if (c == 0) continue;
            const Packet& src = info[i];
            Packet& dst = coded[j];
            for (size_t b = 0; b < len; ++b) dst[b] ^= gf::mul(c, src[b]);
        }
    }
    return coded;
}

std::vector<Packet> mds_decode(const GeneratorMatrix& g, const std::vector<Share>& shares) {
    const int k = g.k();

    // First k distinct in-range indices, in the order given.
    std::vector<const Share*> picked;
    std::vector<bool> seen(g.n() + 1, false);
    size_t len = 0;
    for (const auto& s : shares) {
        if (s.index < 1 || s.index > g.n())
            throw param_error("mds_decode: coded index " + std::to_string(s.index) +
                              " outside [1, " + std::to_string(g.n()) + "]");
        if (seen[s.index]) continue;
        seen[s.index] = true;
        if (picked.empty())
            len = s.data.size();
        else if (s.data.size() != len)
            throw param_error("mds_decode: shares differ in length");
        if (static_cast<int>(picked.size()) < k) picked.push_back(&s);
    }
    if (static_cast<int>(picked.size()) < k)
        throw param_error("mds_decode: insufficient shares, need " + std::to_string(k) +
                          " distinct coded indices, got " + std::to_string(picked.size()));
    for (const auto& s : shares)
        if (s.data.size() != len) throw param_error("mds_decode: shares differ in length");

    // Gauss-Jordan on the k x k submatrix, mirroring every row operation
    // onto the payloads.
    std::vector<std::uint8_t> m(static_cast<size_t>(k) * k);
    std::vector<Packet> rhs(k);
    for (int r = 0; r < k; ++r) {
        for (int i = 0; i < k; ++i) m[r * k + i] = g.at(i, picked[r]->index - 1);
        rhs[r] = picked[r]->data;
    }
    for (int col = 0; col < k; ++col) {
        int pivot = -1;
        for (int r = col; r < k; ++r)
            if (m[r * k + col] != 0) { pivot = r; break; }
        if (pivot < 0)
            throw protocol_error("mds_decode: singular share submatrix"); // distinct Vandermonde nodes make this unreachable
        if (pivot != col) {
            for (int i = 0; i < k; ++i) std::swap(m[pivot * k + i], m[col * k + i]);
            std::swap(rhs[pivot], rhs[col]);
        }
        const std::uint8_t pinv = gf::inv(m[col * k + col]);
        for (int i = 0; i < k; ++i) m[col * k + i] = gf::mul(m[col * k + i], pinv);
        for (auto& b : rhs[col]) b = gf::mul(b, pinv);
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            const std::uint8_t f = m[r * k + col];
            if (f == 0) continue;
            for (int i = 0; i < k; ++i) m[r * k + i] ^= gf::mul(f, m[col * k + i]);
            for (size_t b = 0; b < len; ++b) rhs[r][b] ^= gf::mul(f, rhs[col][b]);
        }
    }

    // Every provided share must match the re-encoding of the solution.
    for (const auto& s : shares) {
        Packet expect(len, 0);
        for (int i = 0; i < k; ++i) {
            const std::uint8_t c = g.at(i, s.index - 1);
            if (c == 0) continue;
            for (size_t b = 0; b < len; ++b) expect[b] ^= gf::mul(c, rhs[i][b]);
        }
        if (expect != s.data)
            throw protocol_error("mds_decode: inconsistent share at coded index " +
                                 std::to_string(s.index));
    }
    return rhs;
}

} // namespace hotcache
