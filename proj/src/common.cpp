#include "hotcache/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace hotcache {

std::string Verdict::summary() const {
    if (ok()) return "pass";
    std::string s = "fail (" + std::to_string(violations.size()) + " violation";
    if (violations.size() != 1) s += "s";
    s += ")";
    return s;
}

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > static_cast<__int128>(1) << 62)
            throw param_error("binom(" + std::to_string(n) + "," + std::to_string(k) +
                              ") exceeds 64-bit range");
    }
    return static_cast<long long>(r);
}

long long subset_rank(const std::vector<int>& subset, int n) {
    long long rank = 0;
    int k = static_cast<int>(subset.size());
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        for (int x = prev + 1; x < subset[i]; ++x)
            rank += binom(n - 1 - x, k - 1 - i);
        prev = subset[i];
    }
    return rank;
}

std::vector<int> subset_unrank(long long rank, int n, int k) {
    std::vector<int> out;
    out.reserve(k);
    int x = 0;
    for (int i = 0; i < k; ++i) {
        while (true) {
            long long below = binom(n - 1 - x, k - 1 - i);
            if (rank < below) break;
            rank -= below;
            ++x;
        }
        out.push_back(x++);
    }
    return out;
}

namespace {

int thread_cap() {
    if (const char* env = std::getenv("HOTCACHE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

} // namespace

void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = std::min(n, thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace hotcache
