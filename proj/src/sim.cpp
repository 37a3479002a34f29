#include "hotcache/sim.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hotcache {

namespace {

std::string user_str(const UserId& u) {
    return "(" + std::to_string(u.k1) + "," + std::to_string(u.k2) + ")";
}

// Labels in one column of an array, optionally restricted to given rows.
std::set<int> column_labels(const PdaArray& arr, int col, const std::vector<int>* rows = nullptr) {
    std::set<int> out;
    if (rows) {
        for (int r : *rows)
            if (arr.at(r, col).is_label()) out.insert(arr.at(r, col).label_value());
    } else {
        for (int r = 1; r <= arr.rows; ++r)
            if (arr.at(r, col).is_label()) out.insert(arr.at(r, col).label_value());
    }
    return out;
}

void xor_into(Packet& dst, const Packet& src) {
    for (size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

} // namespace

Library make_library(int n_files, int bytes_per_file, std::uint64_t seed) {
    if (n_files < 1) throw param_error("library: need at least one file");
    if (bytes_per_file < 1) throw param_error("library: files must be non-empty");
    Library lib;
    SplitMix64 rng(seed);
    lib.files.assign(n_files, {});
    for (auto& file : lib.files) {
        file.resize(bytes_per_file);
        for (int i = 0; i < bytes_per_file; ++i)
            file[i] = static_cast<std::uint8_t>(rng.next() & 0xFF);
    }
    return lib;
}

CacheState place(const HhpdaPair& pair, const Library& lib) {
    if (lib.n_files() < 1) throw param_error("place: empty library");
    const size_t file_len = lib.files[0].size();
    for (const auto& f : lib.files)
        if (f.size() != file_len) throw param_error("place: files differ in length");
    if (file_len == 0 || file_len % pair.p.fprime != 0)
        throw param_error("place: file length " + std::to_string(file_len) +
                          " is not a positive multiple of F'=" + std::to_string(pair.p.fprime));

    CacheState out;
    out.packet_len = static_cast<int>(file_len) / pair.p.fprime;
    out.gen = mds_generator(pair.p.f, pair.p.fprime);
    out.coded.reserve(lib.n_files());
    for (const auto& file : lib.files) {
        std::vector<Packet> info(pair.p.fprime);
        for (int i = 0; i < pair.p.fprime; ++i)
            info[i].assign(file.begin() + static_cast<long>(i) * out.packet_len,
                           file.begin() + static_cast<long>(i + 1) * out.packet_len);
        out.coded.push_back(mds_encode(out.gen, info));
    }

    out.mirror_rows.resize(pair.p.k1);
    for (int k1 = 1; k1 <= pair.p.k1; ++k1) out.mirror_rows[k1 - 1] = pair.q0.star_rows(k1);
    out.user_rows.assign(pair.p.k1, {});
    for (int k1 = 1; k1 <= pair.p.k1; ++k1) {
        out.user_rows[k1 - 1].resize(pair.p.k2);
        for (int k2 = 1; k2 <= pair.p.k2; ++k2)
            out.user_rows[k1 - 1][k2 - 1] = pair.mirror_grid(k1).star_rows(k2);
    }
    return out;
}

int Session::user_index(const UserId& u) const {
    for (size_t i = 0; i < tau.size(); ++i)
        if (tau[i] == u) return static_cast<int>(i) + 1;
    return 0;
}

Session make_session(const HhpdaPair& pair, std::vector<UserId> tau, std::vector<int> demands,
                     ZetaStrategy strategy, std::uint64_t seed) {
    Session s;
    s.tau = std::move(tau);
    std::sort(s.tau.begin(), s.tau.end());
    if (static_cast<int>(demands.size()) != pair.p.kprime)
        throw param_error("session: demand vector must have K'=" + std::to_string(pair.p.kprime) +
                          " entries, got " + std::to_string(demands.size()));
    for (int d : demands)
        if (d < 1) throw param_error("session: file ids are 1-based");
    s.demands = std::move(demands);
    s.strategy = strategy;
    s.seed = seed;
    s.zeta = find_zeta(pair, s.tau, strategy); // validates tau
    s.qbar = fill_qbar(pair, s.zeta, s.tau);
    return s;
}

std::vector<Transmission> server_transmissions(const HhpdaPair& pair, const Session& session,
                                               const CacheState& caches) {
    for (int d : session.demands)
        if (d > static_cast<int>(caches.coded.size()))
            throw param_error("server: demanded file " + std::to_string(d) +
                              " outside the library");
    std::vector<Transmission> out;
    for (int label : pair.s_labels) {
        Transmission tx;
        tx.sender = Transmission::Sender::Server;
        tx.phase = Transmission::Phase::Server;
        tx.label = label;
        tx.payload.assign(caches.packet_len, 0);
        for (int r = 1; r <= session.qbar.rows; ++r)
            for (int c = 1; c <= session.qbar.cols; ++c) {
                const Cell cell = session.qbar.at(r, c);
                if (!cell.is_label() || cell.label_value() != label) continue;
                const int file_id = session.demands[c - 1];
                const int coded_index = session.zeta[r - 1];
                tx.terms.push_back({file_id, coded_index});
                xor_into(tx.payload, caches.coded_packet(file_id, coded_index));
            }
        std::sort(tx.terms.begin(), tx.terms.end());
        out.push_back(std::move(tx));
    }
    return out;
}

std::vector<Transmission> mirror_transmissions(const HhpdaPair& pair, const Session& session,
                                               const CacheState& caches, int k1,
                                               const std::vector<Transmission>& server_msgs) {
    if (k1 < 1 || k1 > pair.p.k1) throw param_error("mirror_transmissions: bad mirror id");

    std::vector<int> local_positions; // 1-based positions of k1's active users
    for (size_t i = 0; i < session.tau.size(); ++i)
        if (session.tau[i].k1 == k1) local_positions.push_back(static_cast<int>(i) + 1);
    if (local_positions.empty()) return {};

    const std::vector<int>& cached_rows = caches.mirror_rows[k1 - 1];
    auto mirror_has = [&](int row) {
        return std::binary_search(cached_rows.begin(), cached_rows.end(), row);
    };

    std::vector<Transmission> out;

    // Relay phase: every server label wanted by a local user, with terms
    // of non-local users cancelled whenever this mirror caches them.
    std::set<int> wanted;
    for (int pos : local_positions) {
        const std::set<int> col = column_labels(session.qbar, pos);
        wanted.insert(col.begin(), col.end());
    }
    for (int label : wanted) {
        auto it = std::find_if(server_msgs.begin(), server_msgs.end(),
                               [&](const Transmission& t) { return t.label == label; });
        if (it == server_msgs.end())
            throw protocol_error("mirror " + std::to_string(k1) + ": server message " +
                                 std::to_string(label) + " missing");
        Transmission tx;
        tx.sender = Transmission::Sender::Mirror;
        tx.phase = Transmission::Phase::MirrorRelay;
        tx.mirror = k1;
        tx.label = label;
        tx.payload = it->payload;
        tx.terms = it->terms;
        for (int r = 1; r <= session.qbar.rows; ++r)
            for (int c = 1; c <= session.qbar.cols; ++c) {
                const Cell cell = session.qbar.at(r, c);
                if (!cell.is_label() || cell.label_value() != label) continue;
                if (session.tau[c - 1].k1 == k1) continue; // keep local users' terms
                const int coded_index = session.zeta[r - 1];
                if (!mirror_has(coded_index)) continue;
                const int file_id = session.demands[c - 1];
                xor_into(tx.payload, caches.coded_packet(file_id, coded_index));
                auto term = std::make_pair(file_id, coded_index);
                auto pos_it = std::find(tx.terms.begin(), tx.terms.end(), term);
                if (pos_it == tx.terms.end())
                    throw protocol_error("mirror " + std::to_string(k1) +
                                         ": cancelling a term absent from message " +
                                         std::to_string(label));
                tx.terms.erase(pos_it);
            }
        out.push_back(std::move(tx));
    }

    // Local phase: labels of the mirror's own grid within the chosen rows,
    // restricted to columns of active local users.
    std::set<int> local_labels;
    for (int pos : local_positions)
        for (int label :
             column_labels(pair.mirror_grid(k1), session.tau[pos - 1].k2, &session.zeta))
            local_labels.insert(label);
    for (int label : local_labels) {
        Transmission tx;
        tx.sender = Transmission::Sender::Mirror;
        tx.phase = Transmission::Phase::MirrorLocal;
        tx.mirror = k1;
        tx.label = label;
        tx.payload.assign(caches.packet_len, 0);
        for (int pos : local_positions) {
            const int k2 = session.tau[pos - 1].k2;
            for (int row : session.zeta) {
                const Cell cell = pair.mirror_grid(k1).at(row, k2);
                if (!cell.is_label() || cell.label_value() != label) continue;
                const int file_id = session.demands[pos - 1];
                tx.terms.push_back({file_id, row});
                xor_into(tx.payload, caches.coded_packet(file_id, row));
            }
        }
        std::sort(tx.terms.begin(), tx.terms.end());
        out.push_back(std::move(tx));
    }
    return out;
}

std::vector<std::uint8_t> user_decode(const HhpdaPair& pair, const Session& session,
                                      const UserId& user, const CacheState& caches,
                                      const std::vector<Transmission>& mirror_msgs,
                                      int* pooled_out) {
    const int pos = session.user_index(user);
    if (pos == 0)
        throw param_error("user_decode: user " + user_str(user) + " is not active");
    const int demand = session.demands[pos - 1];
    const std::vector<int>& own_rows = caches.user_rows[user.k1 - 1][user.k2 - 1];
    auto cached = [&](int row) {
        return std::binary_search(own_rows.begin(), own_rows.end(), row);
    };

    const std::set<int> relay_wanted = column_labels(session.qbar, pos);
    const std::set<int> local_wanted =
        column_labels(pair.mirror_grid(user.k1), user.k2, &session.zeta);

    std::map<int, Packet> recovered; // coded index -> packet of the demanded file
    for (const Transmission& tx : mirror_msgs) {
        if (tx.mirror != user.k1) continue;
        const bool relay = tx.phase == Transmission::Phase::MirrorRelay;
        if (relay && !relay_wanted.count(tx.label)) continue;
        if (!relay && !local_wanted.count(tx.label)) continue;

        Packet residue = tx.payload;
        int unknown_index = 0, unknown_file = 0, unknowns = 0;
        for (const auto& [file_id, coded_index] : tx.terms) {
            if (cached(coded_index)) {
                xor_into(residue, caches.coded_packet(file_id, coded_index));
            } else {
                ++unknowns;
                unknown_index = coded_index;
                unknown_file = file_id;
            }
        }
        if (unknowns != 1)
            throw protocol_error("user " + user_str(user) + ": message " +
                                 std::to_string(tx.label) + " left " + std::to_string(unknowns) +
                                 " unknown terms after cancellation");
        if (unknown_file != demand)
            throw protocol_error("user " + user_str(user) + ": message " +
                                 std::to_string(tx.label) + " resolves a packet of file " +
                                 std::to_string(unknown_file) + ", not the demand");
        recovered.emplace(unknown_index, std::move(residue));
    }

    std::vector<Share> shares;
    for (int row : own_rows) shares.push_back({row, caches.coded_packet(demand, row)});
    for (auto& [index, packet] : recovered)
        if (!cached(index)) shares.push_back({index, packet});
    if (pooled_out) *pooled_out = static_cast<int>(shares.size());
    if (static_cast<int>(shares.size()) < pair.p.fprime)
        throw protocol_error("user " + user_str(user) + ": only " +
                             std::to_string(shares.size()) + " coded packets available, need " +
                             std::to_string(pair.p.fprime));

    const std::vector<Packet> info = mds_decode(caches.gen, shares);
    std::vector<std::uint8_t> bytes;
    bytes.reserve(static_cast<size_t>(pair.p.fprime) * caches.packet_len);
    for (const Packet& p : info) bytes.insert(bytes.end(), p.begin(), p.end());
    return bytes;
}

LoadSummary theoretical_loads(const HhpdaPair& pair, const Session& session) {
    LoadSummary out;
    out.r1 = {static_cast<long long>(pair.s_labels.size()), pair.p.fprime};
    out.per_mirror.resize(pair.p.k1);
    long long worst = 0;
    for (int k1 = 1; k1 <= pair.p.k1; ++k1) {
        MirrorLoad& m = out.per_mirror[k1 - 1];
        m.k1 = k1;
        std::set<int> relay, local;
        for (size_t i = 0; i < session.tau.size(); ++i) {
            if (session.tau[i].k1 != k1) continue;
            m.active = true;
            const std::set<int> col = column_labels(session.qbar, static_cast<int>(i) + 1);
            relay.insert(col.begin(), col.end());
            for (int label : column_labels(pair.mirror_grid(k1), session.tau[i].k2,
                                           &session.zeta))
                local.insert(label);
        }
        m.relay_count = static_cast<int>(relay.size());
        m.local_count = static_cast<int>(local.size());
        worst = std::max(worst, static_cast<long long>(m.relay_count + m.local_count));
    }
    out.r2 = {worst, pair.p.fprime};
    return out;
}

SessionReport run_session(const HhpdaPair& pair, const Library& lib, std::vector<UserId> tau,
                          std::vector<int> demands, ZetaStrategy strategy, std::uint64_t seed) {
    for (int d : demands)
        if (d < 1 || d > lib.n_files())
            throw param_error("session: demanded file " + std::to_string(d) +
                              " outside the library of " + std::to_string(lib.n_files()));

    const Session session = make_session(pair, std::move(tau), std::move(demands), strategy, seed);
    const CacheState caches = place(pair, lib);

    SessionReport rep;
    rep.tau = session.tau;
    rep.demands = session.demands;
    rep.zeta = session.zeta;
    rep.strategy = strategy;
    rep.seed = seed;
    rep.n_files = lib.n_files();
    rep.packet_len = caches.packet_len;

    const std::vector<Transmission> server = server_transmissions(pair, session, caches);
    rep.r1_measured = {static_cast<long long>(server.size()), pair.p.fprime};
    rep.bytes_server = static_cast<long long>(server.size()) * caches.packet_len;

    std::vector<std::vector<Transmission>> per_mirror(pair.p.k1);
    rep.measured_mirrors.resize(pair.p.k1);
    long long worst = 0;
    for (int k1 = 1; k1 <= pair.p.k1; ++k1) {
        per_mirror[k1 - 1] = mirror_transmissions(pair, session, caches, k1, server);
        MirrorLoad& m = rep.measured_mirrors[k1 - 1];
        m.k1 = k1;
        for (const Transmission& tx : per_mirror[k1 - 1]) {
            m.active = true;
            if (tx.phase == Transmission::Phase::MirrorRelay)
                ++m.relay_count;
            else
                ++m.local_count;
        }
        rep.bytes_mirrors +=
            static_cast<long long>(per_mirror[k1 - 1].size()) * caches.packet_len;
        worst = std::max(worst, static_cast<long long>(m.relay_count + m.local_count));
    }
    rep.r2_measured = {worst, pair.p.fprime};

    const LoadSummary theory = theoretical_loads(pair, session);
    rep.r1_theory = theory.r1;
    rep.r2_theory = theory.r2;
    rep.theory_mirrors = theory.per_mirror;
    rep.loads_match = rep.r1_measured == rep.r1_theory && rep.r2_measured == rep.r2_theory;
    for (int k1 = 1; k1 <= pair.p.k1 && rep.loads_match; ++k1) {
        const MirrorLoad& a = rep.measured_mirrors[k1 - 1];
        const MirrorLoad& b = theory.per_mirror[k1 - 1];
        if (a.relay_count != b.relay_count || a.local_count != b.local_count)
            rep.loads_match = false;
    }

    rep.all_decoded = true;
    for (size_t i = 0; i < session.tau.size(); ++i) {
        const UserId& u = session.tau[i];
        DecodeResult res;
        res.user = u;
        res.demand = session.demands[i];
        const std::vector<std::uint8_t> bytes =
            user_decode(pair, session, u, caches, per_mirror[u.k1 - 1], &res.pooled_indices);
        res.ok = bytes == lib.files[res.demand - 1];
        if (!res.ok) rep.all_decoded = false;
        rep.decodes.push_back(res);
    }
    return rep;
}

std::vector<SessionReport> sweep(const HhpdaPair& pair, const Library& lib,
                                 const SweepOptions& opt) {
    const std::vector<UserId> users = pair.all_users();
    const int n_users = static_cast<int>(users.size());
    const long long total = binom(n_users, pair.p.kprime);

    std::vector<long long> ranks;
    if (opt.all_tau) {
        ranks.resize(total);
        for (long long i = 0; i < total; ++i) ranks[i] = i;
    } else {
        SplitMix64 rng(opt.seed);
        std::set<long long> picked;
        for (int i = 0; i < opt.sample_tau && static_cast<long long>(picked.size()) < total; ++i)
            picked.insert(static_cast<long long>(rng.below(total)));
        ranks.assign(picked.begin(), picked.end());
    }
    if (!opt.random_demands &&
        static_cast<int>(opt.fixed_demands.size()) != pair.p.kprime)
        throw param_error("sweep: fixed demand vector must have K' entries");
    const int repeats = std::max(1, opt.demands_per_tau);

    std::vector<SessionReport> rows(ranks.size() * repeats);
    parallel_for(static_cast<int>(rows.size()), [&](int i) {
        const long long rank = ranks[i / repeats];
        const int draw = i % repeats;
        const std::uint64_t row_seed = opt.seed ^ static_cast<std::uint64_t>(rank);

        std::vector<UserId> tau;
        for (int idx : subset_unrank(rank, n_users, pair.p.kprime)) tau.push_back(users[idx]);

        std::vector<int> demands;
        if (opt.random_demands) {
            SplitMix64 rng(row_seed);
            for (int skip = 0; skip < draw * pair.p.kprime; ++skip) rng.next();
            for (int j = 0; j < pair.p.kprime; ++j)
                demands.push_back(1 + static_cast<int>(rng.below(lib.n_files())));
        } else {
            demands = opt.fixed_demands;
        }

        try {
            rows[i] = run_session(pair, lib, tau, demands, opt.strategy, row_seed);
        } catch (const std::exception& e) {
            SessionReport bad;
            bad.tau = tau;
            bad.demands = demands;
            bad.strategy = opt.strategy;
            bad.seed = row_seed;
            bad.error = e.what();
            rows[i] = std::move(bad);
        }
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::ordered_json mirror_json(const std::vector<MirrorLoad>& loads, int fprime) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const MirrorLoad& m : loads) {
        arr.push_back({{"mirror", m.k1},
                       {"active", m.active},
                       {"relay_count", m.relay_count},
                       {"local_count", m.local_count},
                       {"load", Ratio{m.relay_count + m.local_count, fprime}.str()}});
    }
    return arr;
}

std::string tau_field(const std::vector<UserId>& tau) {
    std::string s;
    for (const UserId& u : tau) s += user_str(u);
    return s;
}

} // namespace

std::string report_to_json(const SessionReport& r) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json tau = nlohmann::ordered_json::array();
    for (const UserId& u : r.tau) tau.push_back({u.k1, u.k2});
    j["tau"] = std::move(tau);
    j["demands"] = r.demands;
    j["zeta"] = r.zeta;
    j["strategy"] = to_string(r.strategy);
    j["seed"] = r.seed;
    j["files"] = r.n_files;
    j["packet_bytes"] = r.packet_len;
    if (!r.error.empty()) {
        j["error"] = r.error;
        return j.dump(2) + "\n";
    }
    const int fprime = static_cast<int>(r.r1_measured.den);
    j["loads"] = {{"R1_measured", r.r1_measured.str()},     {"R1_theory", r.r1_theory.str()},
                  {"R2_measured", r.r2_measured.str()},     {"R2_theory", r.r2_theory.str()},
                  {"R1_value", r.r1_measured.value()},      {"R2_value", r.r2_measured.value()},
                  {"match", r.loads_match}};
    j["mirrors_measured"] = mirror_json(r.measured_mirrors, fprime);
    j["mirrors_theory"] = mirror_json(r.theory_mirrors, fprime);
    nlohmann::ordered_json decodes = nlohmann::ordered_json::array();
    for (const DecodeResult& d : r.decodes)
        decodes.push_back({{"user", {d.user.k1, d.user.k2}},
                           {"demand", d.demand},
                           {"pooled_indices", d.pooled_indices},
                           {"ok", d.ok}});
    j["decodes"] = std::move(decodes);
    j["all_decoded"] = r.all_decoded;
    j["bytes_server"] = r.bytes_server;
    j["bytes_mirrors"] = r.bytes_mirrors;
    return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SessionReport>& rows) {
    std::ostringstream out;
    out << "tau,strategy,seed,R1_measured,R1_theory,R2_measured,R2_theory,"
           "r2_per_mirror,decode_ok,bytes_server,bytes_mirrors\n";
    for (const SessionReport& r : rows) {
        out << tau_field(r.tau) << "," << to_string(r.strategy) << "," << r.seed << ",";
        if (!r.error.empty()) {
            out << ",,,,," << 0 << ",,\n";
            continue;
        }
        out << r.r1_measured.value() << "," << r.r1_theory.value() << ","
            << r.r2_measured.value() << "," << r.r2_theory.value() << ",";
        for (size_t i = 0; i < r.measured_mirrors.size(); ++i) {
            if (i) out << ";";
            const MirrorLoad& m = r.measured_mirrors[i];
            out << Ratio{m.relay_count + m.local_count, r.r1_measured.den}.value();
        }
        out << "," << (r.all_decoded ? 1 : 0) << "," << r.bytes_server << ","
            << r.bytes_mirrors << "\n";
    }
    return out.str();
}

} // namespace hotcache
