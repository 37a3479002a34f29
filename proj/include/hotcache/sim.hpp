/*
 * sim.hpp: end-to-end delivery simulator on real bytes: coded placement
 * into mirror and user caches, server and per-mirror transmissions for a
 * chosen active set and demand vector, per-user decoding with bit-exact
 * verification, and load accounting (measured vs. closed form).
 */
#ifndef HOTCACHE_SIM_HPP
#define HOTCACHE_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hotcache/common.hpp"
#include "hotcache/hhpda.hpp"
#include "hotcache/mds.hpp"

namespace hotcache {

// N equal-length files; length must be a multiple of the pair's F'.
struct Library {
    std::vector<std::vector<std::uint8_t>> files;

    int n_files() const { return static_cast<int>(files.size()); }
};

Library make_library(int n_files, int bytes_per_file, std::uint64_t seed);

// Everything placement produces: the coded packets of every file plus the
// coded-index sets each mirror and each user holds.
struct CacheState {
    GeneratorMatrix gen; // (F, F')
    int packet_len = 0;
    std::vector<std::vector<Packet>> coded;                // [file-1][index-1]
    std::vector<std::vector<int>> mirror_rows;             // [k1-1], sorted 1-based indices
    std::vector<std::vector<std::vector<int>>> user_rows;  // [k1-1][k2-1]

    const Packet& coded_packet(int file_id, int index) const {
        return coded[file_id - 1][index - 1];
    }
};

CacheState place(const HhpdaPair& pair, const Library& lib);

// One delivery session, fixed once the active set is known.
struct Session {
    std::vector<UserId> tau;  // lexicographic; position = bijection index
    std::vector<int> demands; // file ids per position, repeats allowed
    std::vector<int> zeta;
    PdaArray qbar;
    ZetaStrategy strategy = ZetaStrategy::PreferMirrorStar;
    std::uint64_t seed = 0;

    int user_index(const UserId& u) const; // 1-based position, 0 if inactive
};

Session make_session(const HhpdaPair& pair, std::vector<UserId> tau, std::vector<int> demands,
                     ZetaStrategy strategy, std::uint64_t seed);

struct Transmission {
    enum class Sender { Server, Mirror };
    enum class Phase { Server, MirrorRelay, MirrorLocal };

    Sender sender = Sender::Server;
    Phase phase = Phase::Server;
    int mirror = 0; // 0 for server messages
    int label = 0;
    Packet payload;
    std::vector<std::pair<int, int>> terms; // (file id, coded index), sorted
};

// One message per inner-array label, in ascending label order.
std::vector<Transmission> server_transmissions(const HhpdaPair& pair, const Session& session,
                                               const CacheState& caches);

// Relay phase (server messages with the mirror's cached foreign-user
// packets cancelled) followed by the local phase (the mirror's own cached
// packets named by its grid labels); empty when no attached user is active.
std::vector<Transmission> mirror_transmissions(const HhpdaPair& pair, const Session& session,
                                               const CacheState& caches, int k1,
                                               const std::vector<Transmission>& server_msgs);

// Cancels every cached term from each message addressed to the user,
// insists exactly one unknown term remains, pools the recovered packets
// with the user's cached ones and decodes the demanded file. pooled_out,
// when given, receives the number of distinct coded indices available.
std::vector<std::uint8_t> user_decode(const HhpdaPair& pair, const Session& session,
                                      const UserId& user, const CacheState& caches,
                                      const std::vector<Transmission>& mirror_msgs,
                                      int* pooled_out = nullptr);

struct MirrorLoad {
    int k1 = 0;
    bool active = false;
    int relay_count = 0; // distinct server labels forwarded
    int local_count = 0; // distinct own labels sent
};

struct LoadSummary {
    Ratio r1;
    std::vector<MirrorLoad> per_mirror;
    Ratio r2; // max over mirrors of (relay + local) / F'
};

LoadSummary theoretical_loads(const HhpdaPair& pair, const Session& session);

struct DecodeResult {
    UserId user;
    int demand = 0;
    int pooled_indices = 0;
    bool ok = false;
};

struct SessionReport {
    std::vector<UserId> tau;
    std::vector<int> demands;
    std::vector<int> zeta;
    ZetaStrategy strategy = ZetaStrategy::PreferMirrorStar;
    std::uint64_t seed = 0;
    int n_files = 0;
    int packet_len = 0;

    Ratio r1_measured, r1_theory;
    Ratio r2_measured, r2_theory;
    std::vector<MirrorLoad> measured_mirrors;
    std::vector<MirrorLoad> theory_mirrors;
    bool loads_match = false;

    std::vector<DecodeResult> decodes;
    bool all_decoded = false;

    long long bytes_server = 0;
    long long bytes_mirrors = 0;

    std::string error; // set when a sweep row failed outright
};

SessionReport run_session(const HhpdaPair& pair, const Library& lib, std::vector<UserId> tau,
                          std::vector<int> demands, ZetaStrategy strategy, std::uint64_t seed);

struct SweepOptions {
    bool all_tau = true;      // scan every active set
    int sample_tau = 0;       // sampled count when !all_tau
    int demands_per_tau = 1;  // rows per active set
    bool random_demands = true;
    std::vector<int> fixed_demands; // used when !random_demands
    ZetaStrategy strategy = ZetaStrategy::PreferMirrorStar;
    std::uint64_t seed = 0;
};

// Deterministic row order (active-set rank, then demand index); the
// per-row seed mixes the sweep seed with the rank so scheduling cannot
// change results.
std::vector<SessionReport> sweep(const HhpdaPair& pair, const Library& lib,
                                 const SweepOptions& opt);

std::string report_to_json(const SessionReport& r);
std::string sweep_csv(const std::vector<SessionReport>& rows);

} // namespace hotcache

#endif
