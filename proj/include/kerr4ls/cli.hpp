#ifndef KERR4LS_CLI_HPP
#define KERR4LS_CLI_HPP

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kerr4ls/errors.hpp"
#include "kerr4ls/kerr.hpp"
#include "kerr4ls/lambda_spectrum.hpp"
#include "kerr4ls/model.hpp"
#include "kerr4ls/oracle.hpp"
#include "kerr4ls/rs_perturbation.hpp"
#include "kerr4ls/tls_effective.hpp"

namespace kerr4ls {

struct SweepSpec {
    std::string param;
    double start;
    double stop;
    int count;
    bool log_spacing;
};

struct EvolveSpec {
    double t_start;
    double t_stop;
    int count;
};

struct ConvergeSpec {
    std::vector<double> epsilons{5e-2, 2.5e-2, 1.25e-2};
};

struct RunConfig {
    SystemParams params;
    std::optional<SweepSpec> sweep;
    std::optional<EvolveSpec> evolve;
    ConvergeSpec converge;
    long seed = 0;
};

/// Column-oriented result table. Cells are doubles or literal strings;
/// doubles are serialized with 17 significant digits, locale-independent.
struct Table {
    using Cell = std::variant<double, std::string>;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            if (const double* d = std::get_if<double>(&row[c])) {
                out += format_number(*d);
            } else {
                // keep the schema intact: no raw commas inside string cells
                std::string cell = std::get<std::string>(row[c]);
                for (char& ch : cell)
                    if (ch == ',') ch = ';';
                out += cell;
            }
        }
        out += '\n';
    }
    return out;
}

inline std::string to_json(const Table& t) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (size_t c = 0; c < row.size(); ++c) {
            if (const double* d = std::get_if<double>(&row[c]))
                obj[t.columns[c]] = *d;
            else
                obj[t.columns[c]] = std::get<std::string>(row[c]);
        }
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

inline double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw config_error("config: missing or non-numeric key '" + key + "'");
    return j.at(key).get<double>();
}

inline double optional_number(const nlohmann::json& j, const std::string& key,
                              double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw config_error("config: key '" + key + "' must be numeric");
    return j.at(key).get<double>();
}

inline int require_int(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw config_error("config: missing or non-integer key '" + key + "'");
    return j.at(key).get<int>();
}

inline RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    SystemParams& p = cfg.params;
    p.g_a = cplx(require_number(j, "g_a_re"), optional_number(j, "g_a_im", 0.0));
    p.g_b = cplx(require_number(j, "g_b_re"), optional_number(j, "g_b_im", 0.0));
    p.g_c = cplx(require_number(j, "g_c_re"), optional_number(j, "g_c_im", 0.0));
    p.n_a = require_int(j, "n_a");
    p.n_b = require_int(j, "n_b");
    p.n_c = require_int(j, "n_c");
    p.delta_a = require_number(j, "delta_a");
    p.delta_b = require_number(j, "delta_b");
    p.delta_c = require_number(j, "delta_c");
    p.phi = optional_number(j, "phi", 0.0);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<long>();

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        SweepSpec spec;
        if (!s.contains("param") || !s.at("param").is_string())
            throw config_error("config: sweep.param must be a string");
        spec.param = s.at("param").get<std::string>();
        spec.start = require_number(s, "start");
        spec.stop = require_number(s, "stop");
        spec.count = require_int(s, "count");
        const std::string spacing =
            s.contains("spacing") ? s.at("spacing").get<std::string>() : "linear";
        if (spacing != "linear" && spacing != "log")
            throw config_error("config: sweep.spacing must be linear or log");
        spec.log_spacing = spacing == "log";
        if (spec.count < 2) throw config_error("config: sweep.count must be >= 2");
        if (spec.log_spacing && (spec.start <= 0.0 || spec.stop <= 0.0))
            throw config_error("config: log spacing requires positive endpoints");
        static const char* allowed[] = {"g_a_re",  "g_a_im",  "g_b_re", "g_b_im",
                                        "g_c_re",  "g_c_im",  "delta_a",
                                        "delta_b", "delta_c", "phi"};
        bool ok = false;
        for (const char* a : allowed) ok = ok || spec.param == a;
        if (!ok)
            throw config_error("config: sweep.param '" + spec.param +
                               "' is not a sweepable numeric field");
        cfg.sweep = spec;
    }

    if (j.contains("evolve")) {
        const auto& e = j.at("evolve");
        EvolveSpec spec;
        spec.t_start = require_number(e, "t_start");
        spec.t_stop = require_number(e, "t_stop");
        spec.count = require_int(e, "count");
        if (spec.count < 1) throw config_error("config: evolve.count must be >= 1");
        cfg.evolve = spec;
    }

    if (j.contains("converge")) {
        const auto& c = j.at("converge");
        if (c.contains("epsilons")) {
            if (!c.at("epsilons").is_array())
                throw config_error("config: converge.epsilons must be an array");
            cfg.converge.epsilons = c.at("epsilons").get<std::vector<double>>();
        }
    }
    return cfg;
}

inline void set_param(SystemParams& p, const std::string& name, double value) {
    if (name == "g_a_re") p.g_a = cplx(value, p.g_a.imag());
    else if (name == "g_a_im") p.g_a = cplx(p.g_a.real(), value);
    else if (name == "g_b_re") p.g_b = cplx(value, p.g_b.imag());
    else if (name == "g_b_im") p.g_b = cplx(p.g_b.real(), value);
    else if (name == "g_c_re") p.g_c = cplx(value, p.g_c.imag());
    else if (name == "g_c_im") p.g_c = cplx(p.g_c.real(), value);
    else if (name == "delta_a") p.delta_a = value;
    else if (name == "delta_b") p.delta_b = value;
    else if (name == "delta_c") p.delta_c = value;
    else if (name == "phi") p.phi = value;
    else throw config_error("unknown parameter '" + name + "'");
}

inline std::string join_flags(const std::vector<KerrFlag>& flags) {
    std::string out;
    for (const KerrFlag f : flags) {
        if (!out.empty()) out += ';';
        out += to_string(f);
    }
    return out;
}

inline Table run_spectrum(const RunConfig& cfg) {
    const SystemParams& p = cfg.params;
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    const LambdaConstants c = lambda_constants(r, d);
    const Hamiltonian4 ham = build_hamiltonian(p);
    const PerturbationSplit split{ham.h0, ham.v, ham.epsilon,
                                  dressed_basis(r, d)};
    const PerturbationResult pt = second_order_energies(split);
    const ClosedFormCorrections closed = closed_form_corrections(c, r, d);
    const EigenDecomposition exact = eigh<4>(ham.h);
    const OverlapPairing pairing = match_by_overlap(split.basis, exact);
    const double e_tls = tls_ground_energy(make_tls(r, d, p.phi));

    Table t;
    t.columns = {"state",  "e0",      "e2",      "e_pt2",       "e_tls",
                 "e_exact", "overlap", "closed_form", "closed_form_flag"};
    for (int n = 1; n <= 4; ++n) {
        std::vector<Table::Cell> row;
        row.emplace_back(static_cast<double>(n));
        row.emplace_back(pt.e0[n - 1]);
        row.emplace_back(pt.e2[n - 1]);
        row.emplace_back(perturbed_energy(pt, n, ham.epsilon));
        if (n == 1)
            row.emplace_back(e_tls);
        else
            row.emplace_back(std::string{});
        row.emplace_back(exact.values(pairing.exact_index[n - 1]));
        row.emplace_back(pairing.overlap[n - 1]);
        row.emplace_back(closed.values[n - 1]);
        row.emplace_back(
            std::string(closed.consistent[n - 1] ? "CONSISTENT" : "DISCREPANT"));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline nlohmann::ordered_json run_kerr(const RunConfig& cfg) {
    kerr_coupling(cfg.params); // guard: throws for delta_3 = 0 or g_b = 0
    const KerrReport rep = validity_report(cfg.params);
    nlohmann::ordered_json j;
    j["k_value"] = rep.k_value;
    j["dark_energy_exact"] = rep.dark_energy_exact;
    j["dark_energy_kerr"] = rep.dark_energy_kerr;
    j["ratio_b_over_a"] = rep.ratio_b_over_a;
    j["ratio_b_over_c"] = rep.ratio_b_over_c;
    j["ratio_det"] = rep.ratio_det;
    j["flags"] = nlohmann::ordered_json::array();
    for (const KerrFlag f : rep.flags) j["flags"].push_back(to_string(f));
    return j;
}

inline Table run_sweep(const RunConfig& cfg) {
    if (!cfg.sweep) throw config_error("sweep command requires a sweep block");
    const SweepSpec& spec = *cfg.sweep;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Table t;
    t.columns = {"param",      "value",       "status",   "e_exact_dark",
                 "e_pt2_dark", "e_tls",       "kerr_energy",
                 "rel_err_pt2", "rel_err_kerr", "flags"};

    for (int i = 0; i < spec.count; ++i) {
        const double frac =
            static_cast<double>(i) / static_cast<double>(spec.count - 1);
        const double value =
            spec.log_spacing
                ? std::exp(std::log(spec.start) +
                           frac * (std::log(spec.stop) - std::log(spec.start)))
                : spec.start + frac * (spec.stop - spec.start);

        SystemParams p = cfg.params;
        set_param(p, spec.param, value);

        double e_exact = nan, e_pt2 = nan, e_tls = nan, e_kerr = nan;
        std::string status = "ok";
        std::string flags;
        try {
            const RabiSet r = rabi_from_params(p);
            const Detunings d = detunings_from_params(p);
            try {
                e_tls = tls_ground_energy(make_tls(r, d, p.phi));
            } catch (const physics_error&) {}
            try {
                e_exact = oracle_dark_energy(p);
            } catch (const physics_error&) {}
            try {
                flags = join_flags(validity_report(p).flags);
            } catch (const physics_error&) {}
            const PerturbationSplit split = make_split(p);
            const PerturbationResult pt = second_order_energies(split);
            e_pt2 = perturbed_energy(pt, 1, split.epsilon);
            e_kerr = kerr_energy(p);
        } catch (const physics_error&) {
            status = "physics_error";
        }

        std::vector<Table::Cell> row;
        row.emplace_back(spec.param);
        row.emplace_back(value);
        row.emplace_back(status);
        row.emplace_back(e_exact);
        row.emplace_back(e_pt2);
        row.emplace_back(e_tls);
        row.emplace_back(e_kerr);
        row.emplace_back(std::abs(e_pt2 - e_exact) / std::abs(e_exact));
        row.emplace_back(std::abs(e_kerr - e_exact) / std::abs(e_exact));
        row.emplace_back(flags);
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table run_evolve(const RunConfig& cfg) {
    if (!cfg.evolve) throw config_error("evolve command requires an evolve block");
    const EvolveSpec& spec = *cfg.evolve;

    Table t;
    t.columns = {"t",     "phase", "re_1", "im_1", "re_2", "im_2",
                 "re_3",  "im_3",  "re_4", "im_4", "norm"};
    for (int i = 0; i < spec.count; ++i) {
        const double frac =
            spec.count == 1 ? 0.0
                            : static_cast<double>(i) /
                                  static_cast<double>(spec.count - 1);
        const double time = spec.t_start + frac * (spec.t_stop - spec.t_start);
        const XpmEvolution ev = xpm_evolution(cfg.params, time);

        std::vector<Table::Cell> row;
        row.emplace_back(time);
        row.emplace_back(ev.phase);
        for (int k = 0; k < 4; ++k) {
            row.emplace_back(ev.final_state(k).real());
            row.emplace_back(ev.final_state(k).imag());
        }
        row.emplace_back(ev.final_state.norm());
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table run_converge(const RunConfig& cfg) {
    const ConvergenceScan scan =
        convergence_scan(cfg.params, cfg.converge.epsilons);

    Table t;
    t.columns = {"state", "epsilon", "residual", "slope", "saturated",
                 "dark_pass"};
    for (int n = 1; n <= 4; ++n) {
        const ConvergenceEstimate& est = scan.states[n - 1];
        for (size_t i = 0; i < scan.epsilons.size(); ++i) {
            std::vector<Table::Cell> row;
            row.emplace_back(static_cast<double>(n));
            row.emplace_back(scan.epsilons[i]);
            row.emplace_back(est.residuals[i]);
            row.emplace_back(est.slope);
            row.emplace_back(std::string(est.saturated ? "yes" : "no"));
            if (n == 1)
                row.emplace_back(std::string(
                    !est.saturated && est.slope >= 3.5 ? "PASS" : "FAIL"));
            else
                row.emplace_back(std::string{});
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

} // namespace kerr4ls

#endif
