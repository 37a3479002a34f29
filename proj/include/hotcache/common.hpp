/*
 * common.hpp: shared utilities: error types, verdicts, exact load
 * fractions, binomials, deterministic RNG and a bounded parallel-for.
 */
#ifndef HOTCACHE_COMMON_HPP
#define HOTCACHE_COMMON_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hotcache {

// Bad arguments or violated preconditions; the message names the clause.
struct param_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed files or schema violations; the message carries field context.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime consistency violations: inconsistent shares, a delivery message
// with more than one unknown term, an infeasible row assignment.
struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Result of a verifier. Violations are failures; warnings and notes are
// informational and do not affect ok().
struct Verdict {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;

    bool ok() const { return violations.empty(); }

    void fail(std::string msg) { violations.push_back(std::move(msg)); }
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
    void note(std::string msg) { notes.push_back(std::move(msg)); }

    std::string summary() const;
};

// Exact fraction for transmission loads and memory ratios (packet counts
// over a subpacketization level). Kept unreduced so "5/9" prints as stated.
struct Ratio {
    long long num = 0;
    long long den = 1;

    double value() const { return den == 0 ? 0.0 : double(num) / double(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
    }
};

// Exact binomial coefficient; throws on overflow rather than wrapping.
long long binom(int n, int k);

// Rank of an index subset (0-based, strictly increasing) among all
// k-subsets of [0, n) in lexicographic order.
long long subset_rank(const std::vector<int>& subset, int n);

// Inverse of subset_rank.
std::vector<int> subset_unrank(long long rank, int n, int k);

// Calls fn on every k-subset of {1, ..., n}, lexicographically. The
// vector passed to fn is reused between calls.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i + 1;
    while (true) {
        fn(const_cast<const std::vector<int>&>(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - (k - 1 - i)) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// SplitMix64: tiny deterministic generator used for seeding and sampling.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) without modulo bias worth caring about here.
    std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }

  private:
    std::uint64_t state_;
};

// Runs fn(i) for i in [0, n). Parallelism is capped by HOTCACHE_THREADS
// (default: hardware concurrency); results must be written into
// caller-owned slots indexed by i so aggregation stays deterministic.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace hotcache

#endif
