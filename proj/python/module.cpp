/*
 * Python bindings for the hotcache core: designs, array pairs, the MDS
 * codec and the delivery simulator. Grids cross the boundary as lists of
 * lists with None (null), "*" (star) or a positive int per cell.
 */
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hotcache/design.hpp"
#include "hotcache/gf256.hpp"
#include "hotcache/hhpda.hpp"
#include "hotcache/mds.hpp"
#include "hotcache/pda.hpp"
#include "hotcache/sim.hpp"

namespace py = pybind11;
using namespace hotcache;

namespace {

py::object cell_to_py(Cell c) {
    if (c.is_star()) return py::str("*");
    if (c.is_null()) return py::none();
    return py::int_(c.label_value());
}

py::list grid_to_py(const PdaArray& arr) {
    py::list rows;
    for (int r = 1; r <= arr.rows; ++r) {
        py::list row;
        for (int c = 1; c <= arr.cols; ++c) row.append(cell_to_py(arr.at(r, c)));
        rows.append(row);
    }
    return rows;
}

PdaArray grid_from_py(const py::sequence& rows) {
    const int n_rows = static_cast<int>(py::len(rows));
    if (n_rows == 0) throw param_error("grid: no rows");
    const int n_cols = static_cast<int>(py::len(rows[0]));
    PdaArray arr(n_rows, n_cols);
    for (int r = 1; r <= n_rows; ++r) {
        py::sequence row = rows[r - 1].cast<py::sequence>();
        if (static_cast<int>(py::len(row)) != n_cols)
            throw param_error("grid: ragged rows");
        for (int c = 1; c <= n_cols; ++c) {
            py::object cell = row[c - 1];
            if (cell.is_none())
                arr.at(r, c) = Cell::null();
            else if (py::isinstance<py::str>(cell) && cell.cast<std::string>() == "*")
                arr.at(r, c) = Cell::star();
            else
                arr.at(r, c) = Cell::label(cell.cast<int>());
        }
    }
    return arr;
}

std::vector<UserId> tau_from_py(const std::vector<std::pair<int, int>>& tau) {
    std::vector<UserId> out;
    for (const auto& [k1, k2] : tau) out.push_back({k1, k2});
    return out;
}

Packet packet_from_py(const py::bytes& b) {
    const std::string s = b;
    return Packet(s.begin(), s.end());
}

py::bytes packet_to_py(const Packet& p) {
    return py::bytes(reinterpret_cast<const char*>(p.data()), p.size());
}

py::dict params_to_py(const HhpdaParams& p) {
    py::dict d;
    d["K1"] = p.k1;
    d["K2"] = p.k2;
    d["Kprime"] = p.kprime;
    d["F"] = p.f;
    d["Fprime"] = p.fprime;
    d["Z1"] = p.z1;
    d["Z2"] = p.z2;
    d["Zprime"] = p.zprime;
    return d;
}

py::dict report_to_py(const SessionReport& r) {
    py::dict d;
    py::list tau;
    for (const UserId& u : r.tau) tau.append(py::make_tuple(u.k1, u.k2));
    d["tau"] = tau;
    d["demands"] = r.demands;
    d["zeta"] = r.zeta;
    d["strategy"] = to_string(r.strategy);
    d["seed"] = r.seed;
    if (!r.error.empty()) {
        d["error"] = r.error;
        return d;
    }
    d["R1"] = r.r1_measured.str();
    d["R1_value"] = r.r1_measured.value();
    d["R2"] = r.r2_measured.str();
    d["R2_value"] = r.r2_measured.value();
    d["loads_match"] = r.loads_match;
    d["all_decoded"] = r.all_decoded;
    py::list mirrors;
    for (const MirrorLoad& m : r.measured_mirrors) {
        py::dict md;
        md["mirror"] = m.k1;
        md["active"] = m.active;
        md["relay_count"] = m.relay_count;
        md["local_count"] = m.local_count;
        mirrors.append(md);
    }
    d["mirrors"] = mirrors;
    py::list decodes;
    for (const DecodeResult& dr : r.decodes) {
        py::dict dd;
        dd["user"] = py::make_tuple(dr.user.k1, dr.user.k2);
        dd["demand"] = dr.demand;
        dd["pooled_indices"] = dr.pooled_indices;
        dd["ok"] = dr.ok;
        decodes.append(dd);
    }
    d["decodes"] = decodes;
    d["bytes_server"] = r.bytes_server;
    d["bytes_mirrors"] = r.bytes_mirrors;
    return d;
}

} // namespace

PYBIND11_MODULE(_hotcache, m) {
    m.doc() = "Hierarchical hotplug coded caching: array construction, "
              "verification and delivery simulation";

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("violations", &Verdict::violations)
        .def_readonly("warnings", &Verdict::warnings)
        .def_readonly("notes", &Verdict::notes)
        .def("ok", &Verdict::ok)
        .def("__bool__", &Verdict::ok)
        .def("__repr__", [](const Verdict& v) { return "<Verdict " + v.summary() + ">"; });

    py::class_<TDesign>(m, "TDesign")
        .def(py::init([](int t, int v, int k, int lambda,
                         std::vector<std::vector<int>> blocks) {
                 return TDesign{t, v, k, lambda, std::move(blocks)};
             }),
             py::arg("t"), py::arg("v"), py::arg("k"), py::arg("lambda_"), py::arg("blocks"))
        .def_readonly("t", &TDesign::t)
        .def_readonly("v", &TDesign::v)
        .def_readonly("k", &TDesign::k)
        .def_readonly("lambda_", &TDesign::lambda)
        .def_readonly("blocks", &TDesign::blocks)
        .def("__repr__", [](const TDesign& d) {
            return "<TDesign " + std::to_string(d.t) + "-(" + std::to_string(d.v) + "," +
                   std::to_string(d.k) + "," + std::to_string(d.lambda) + ") with " +
                   std::to_string(d.block_count()) + " blocks>";
        });

    m.def("gf_mul", [](int a, int b) {
        if (a < 0 || a > 255 || b < 0 || b > 255) throw param_error("gf_mul: bytes only");
        return static_cast<int>(gf::mul(static_cast<std::uint8_t>(a),
                                        static_cast<std::uint8_t>(b)));
    });
    m.def("gf_inv", [](int a) {
        if (a < 0 || a > 255) throw param_error("gf_inv: bytes only");
        return static_cast<int>(gf::inv(static_cast<std::uint8_t>(a)));
    });

    m.def("mds_encode", [](int n, int k, const std::vector<py::bytes>& info) {
        std::vector<Packet> packets;
        for (const auto& b : info) packets.push_back(packet_from_py(b));
        std::vector<py::bytes> out;
        for (const Packet& p : mds_encode(mds_generator(n, k), packets))
            out.push_back(packet_to_py(p));
        return out;
    });
    m.def("mds_decode", [](int n, int k,
                           const std::vector<std::pair<int, py::bytes>>& shares) {
        std::vector<Share> s;
        for (const auto& [idx, data] : shares) s.push_back({idx, packet_from_py(data)});
        std::vector<py::bytes> out;
        for (const Packet& p : mds_decode(mds_generator(n, k), s))
            out.push_back(packet_to_py(p));
        return out;
    });

    m.def("verify_design", &verify_design);
    m.def("lambda_s", &lambda_s);
    m.def("count_containing_avoiding", &count_containing_avoiding);
    m.def("complete_design", &complete_design);
    m.def("load_design", &load_design);
    m.def("store_design", &store_design);
    m.def("catalog_ids", [] {
        std::vector<std::string> out;
        for (const auto& e : design_catalog()) out.push_back(e.id);
        return out;
    });

    m.def("build_b_array",
          [](int t, const std::vector<int>& a) { return grid_to_py(build_b_array(t, a)); });
    m.def("verify_pda", [](const py::sequence& grid) {
        const PdaCheck c = verify_pda(grid_from_py(grid));
        py::dict d;
        d["K"] = c.cols;
        d["F"] = c.rows;
        d["Z"] = c.stars;
        d["S"] = c.label_count;
        return py::make_tuple(c.verdict, d);
    });

    py::class_<HhpdaPair>(m, "HhpdaPair")
        .def_property_readonly("params", [](const HhpdaPair& p) { return params_to_py(p.p); })
        .def_property_readonly("Q0", [](const HhpdaPair& p) { return grid_to_py(p.q0); })
        .def_property_readonly("Q",
                               [](const HhpdaPair& p) {
                                   py::list grids;
                                   for (const auto& g : p.qsub) grids.append(grid_to_py(g));
                                   return grids;
                               })
        .def_property_readonly("B", [](const HhpdaPair& p) { return grid_to_py(p.b); })
        .def_readonly("S", &HhpdaPair::s_labels)
        .def_readonly("S_k", &HhpdaPair::sk_labels)
        .def("verify",
             [](const HhpdaPair& p, bool exhaustive, int samples, std::uint64_t seed) {
                 return verify_hhpda(p, exhaustive ? Coverage::all()
                                                   : Coverage::sample(samples, seed));
             },
             py::arg("exhaustive") = true, py::arg("samples") = 200, py::arg("seed") = 0)
        .def("find_zeta",
             [](const HhpdaPair& p, const std::vector<std::pair<int, int>>& tau,
                const std::string& strategy) {
                 return find_zeta(p, tau_from_py(tau), zeta_strategy_from_string(strategy));
             },
             py::arg("tau"), py::arg("strategy") = "prefer-mirror-star")
        .def("fill_qbar",
             [](const HhpdaPair& p, const std::vector<int>& zeta,
                const std::vector<std::pair<int, int>>& tau) {
                 return grid_to_py(fill_qbar(p, zeta, tau_from_py(tau)));
             })
        .def("store", [](const HhpdaPair& p, const std::string& path) { store_pair(p, path); })
        .def("to_json", &pair_to_json)
        .def("__repr__", [](const HhpdaPair& p) {
            return "<HhpdaPair (" + std::to_string(p.p.k1) + "," + std::to_string(p.p.k2) +
                   "," + std::to_string(p.p.kprime) + "; " + std::to_string(p.p.f) + "," +
                   std::to_string(p.p.fprime) + "; " + std::to_string(p.p.z1) + "," +
                   std::to_string(p.p.z2) + "," + std::to_string(p.p.zprime) + ")>";
        });

    m.def("build_from_design", &build_from_design);
    m.def("construction_params", [](const TDesign& d, int k2, const std::vector<int>& a) {
        const ParamRecord rec = construction_params(d, k2, a);
        py::dict out = params_to_py(rec.p);
        out["S_size"] = rec.s_size;
        out["Sk_size"] = rec.sk_size;
        out["M1_over_N"] = rec.m1_over_n.str();
        out["M2_over_N"] = rec.m2_over_n.str();
        out["R1"] = rec.server_load.str();
        return out;
    });
    m.def("load_pair", &load_pair);
    m.def("pair_from_json", &pair_from_json);
    m.def("example_pair", &example_pair);

    m.def("run_session",
          [](const HhpdaPair& pair, int files, int packet_bytes,
             const std::vector<std::pair<int, int>>& tau, const std::vector<int>& demands,
             const std::string& strategy, std::uint64_t seed) {
              const Library lib = make_library(files, pair.p.fprime * packet_bytes, seed);
              return report_to_py(run_session(pair, lib, tau_from_py(tau), demands,
                                              zeta_strategy_from_string(strategy), seed));
          },
          py::arg("pair"), py::arg("files"), py::arg("packet_bytes"), py::arg("tau"),
          py::arg("demands"), py::arg("strategy") = "prefer-mirror-star", py::arg("seed") = 1);

    m.def("sweep",
          [](const HhpdaPair& pair, int files, int packet_bytes, bool all_tau, int sample,
             int repeats, const std::optional<std::vector<int>>& fixed_demands,
             const std::string& strategy, std::uint64_t seed) {
              const Library lib = make_library(files, pair.p.fprime * packet_bytes, seed);
              SweepOptions opt;
              opt.all_tau = all_tau;
              opt.sample_tau = sample;
              opt.demands_per_tau = repeats;
              if (fixed_demands) {
                  opt.random_demands = false;
                  opt.fixed_demands = *fixed_demands;
              }
              opt.strategy = zeta_strategy_from_string(strategy);
              opt.seed = seed;
              py::list out;
              for (const SessionReport& r : sweep(pair, lib, opt)) out.append(report_to_py(r));
              return out;
          },
          py::arg("pair"), py::arg("files"), py::arg("packet_bytes"), py::arg("all_tau") = true,
          py::arg("sample") = 0, py::arg("repeats") = 1,
          py::arg("fixed_demands") = py::none(), py::arg("strategy") = "prefer-mirror-star",
          py::arg("seed") = 1);

#ifdef VERSION_INFO
#define HOTCACHE_STR2(x) #x
#define HOTCACHE_STR(x) HOTCACHE_STR2(x)
    m.attr("__version__") = HOTCACHE_STR(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
