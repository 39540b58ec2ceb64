#pragma once

// Command-line front end. parse_args builds a RunConfig; run executes it and
// returns the process exit code.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spampur/crosscheck.hpp"
#include "spampur/emit.hpp"
#include "spampur/error.hpp"
#include "spampur/netapps.hpp"
#include "spampur/noise.hpp"
#include "spampur/purify.hpp"
#include "spampur/verify.hpp"

namespace spampur::cli {

enum class Command { purify_prep, purify_meas, fixed_point, condition, verify, distill, swap, tables, oracle_check };

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kFlagged = 2, kIoFailure = 3 };

struct RunConfig {
    Command command = Command::purify_prep;
    std::vector<double> f{0.95};
    std::vector<double> q{0.05};
    std::vector<double> eps{0.0};
    std::vector<int> depths{0, 1, 2, 3, 4};
    std::vector<double> werner{0.6, 0.7, 0.8, 0.9};
    double target = 0.999;
    std::string probs;  ///< JSON object with p00, p01, p10, p11
    std::string counts; ///< same keys, raw counts
    std::optional<std::string> output;
    Format format = Format::csv;
    std::uint64_t seed = InferOptions{}.seed;
};

struct ParseOutcome {
    std::optional<RunConfig> config;
    int exit_code = kOk;
};

inline const std::vector<std::pair<std::string, Command>>& command_names() {
    static const std::vector<std::pair<std::string, Command>> names{
        {"purify-prep", Command::purify_prep}, {"purify-meas", Command::purify_meas},
        {"fixed-point", Command::fixed_point}, {"condition", Command::condition},
        {"verify", Command::verify},           {"distill", Command::distill},
        {"swap", Command::swap},               {"tables", Command::tables},
        {"oracle-check", Command::oracle_check}};
    return names;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        parts.push_back(cur);
    }
    if (!s.empty() && s.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

inline double to_double(const std::string& s) {
    const std::string t = trim(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw InvalidParams("not a number: '" + s + "'");
    }
    if (used != t.size()) {
        throw InvalidParams("not a number: '" + s + "'");
    }
    return v;
}

inline int to_int(const std::string& s) {
    const std::string t = trim(s);
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(t, &used);
    } catch (const std::exception&) {
        throw InvalidParams("not an integer: '" + s + "'");
    }
    if (used != t.size()) {
        throw InvalidParams("not an integer: '" + s + "'");
    }
    return v;
}

} // namespace detail

/// "0..4" (inclusive), "1,3,5", "2", or a mix such as "0..2,5".
inline std::vector<int> parse_int_range(const std::string& spec) {
    std::vector<int> out;
    for (const auto& part : detail::split(spec, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(detail::to_int(part));
            continue;
        }
        const int lo = detail::to_int(part.substr(0, dots));
        const int hi = detail::to_int(part.substr(dots + 2));
        if (hi < lo) {
            throw InvalidParams("empty range '" + part + "'");
        }
        for (int i = lo; i <= hi; ++i) {
            out.push_back(i);
        }
    }
    if (out.empty()) {
        throw InvalidParams("empty range");
    }
    return out;
}

/// "0.9", "0.9,0.95", or "a..b:step" (inclusive of b up to rounding).
inline std::vector<double> parse_real_list(const std::string& spec) {
    std::vector<double> out;
    for (const auto& part : detail::split(spec, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(detail::to_double(part));
            continue;
        }
        const auto colon = part.find(':', dots);
        if (colon == std::string::npos) {
            throw InvalidParams("real range '" + part + "' needs a step, e.g. 0.9..0.99:0.01");
        }
        const double lo = detail::to_double(part.substr(0, dots));
        const double hi = detail::to_double(part.substr(dots + 2, colon - dots - 2));
        const double step = detail::to_double(part.substr(colon + 1));
        if (!(step > 0.0) || hi < lo) {
            throw InvalidParams("invalid real range '" + part + "'");
        }
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            out.push_back(lo + static_cast<double>(i) * step);
        }
    }
    if (out.empty()) {
        throw InvalidParams("empty list");
    }
    return out;
}

inline ParseOutcome parse_args(int argc, const char* const* argv, std::ostream& out = std::cout,
                               std::ostream& err = std::cerr) {
    CLI::App app{"SPAM purification: closed forms, oracle cross-checks, verification and network applications",
                 "spampur"};
    app.set_config("--config", "", "key=value file; command-line flags take precedence");

    std::string command;
    std::string f = "0.95", q = "0.05", eps = "0", depths = "0..4", werner = "0.6,0.7,0.8,0.9";
    std::string format = "csv";
    RunConfig cfg;
    std::string output;

    std::vector<std::string> names;
    for (const auto& [name, _] : command_names()) {
        names.push_back(name);
    }
    app.add_option("command", command, "one of: purify-prep purify-meas fixed-point condition verify distill swap "
                                       "tables oracle-check")
        ->required()
        ->check(CLI::IsMember(names));
    app.add_option("--f", f, "preparation fidelity f, list or a..b:step");
    app.add_option("--q", q, "measurement noise q, list or a..b:step");
    app.add_option("--eps", eps, "CNOT depolarizing fraction, list or a..b:step");
    app.add_option("-n,--n,--m", depths, "ancilla counts, e.g. 0..4 or 1,2");
    app.add_option("--F0", werner, "initial Werner fidelities for distill");
    app.add_option("--target", cfg.target, "distillation target fidelity");
    app.add_option("--probs", cfg.probs, R"(outcome probabilities as JSON, {"p00":..,"p01":..,"p10":..,"p11":..})");
    app.add_option("--counts", cfg.counts, "outcome counts as JSON, same keys");
    app.add_option("-o,--output", output, "output file (directory for tables); default stdout");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", cfg.seed, "seed for the verification solver's random starts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return {std::nullopt, app.exit(e, out, err)};
    } catch (const CLI::CallForAllHelp& e) {
        return {std::nullopt, app.exit(e, out, err)};
    } catch (const CLI::CallForVersion& e) {
        return {std::nullopt, app.exit(e, out, err)};
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return {std::nullopt, kInvalidInput};
    }

    try {
        for (const auto& [name, cmd] : command_names()) {
            if (name == command) {
                cfg.command = cmd;
            }
        }
        cfg.f = parse_real_list(f);
        cfg.q = parse_real_list(q);
        cfg.eps = parse_real_list(eps);
        cfg.depths = parse_int_range(depths);
        cfg.werner = parse_real_list(werner);
        cfg.format = format == "json" ? Format::json : Format::csv;
        if (!output.empty()) {
            cfg.output = output;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return {std::nullopt, kInvalidInput};
    }
    return {cfg, kOk};
}

namespace detail {

inline std::vector<SpamParams> param_grid(const RunConfig& cfg) {
    std::vector<SpamParams> grid;
    for (double f : cfg.f) {
        for (double q : cfg.q) {
            for (double e : cfg.eps) {
                grid.push_back(SpamParams::make(f, q, e));
            }
        }
    }
    return grid;
}

inline void write_table(const Table& t, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.output) {
        emit_file(t, cfg.format, *cfg.output);
        err << "wrote " << t.rows.size() << " records to " << *cfg.output << '\n';
    } else {
        emit(t, cfg.format, out);
    }
}

inline Table purify_prep_table(const RunConfig& cfg) {
    Table t{{}, {"f", "q", "eps", "n", "fidelity", "success"}, {}};
    for (const auto& p : param_grid(cfg)) {
        for (int n : cfg.depths) {
            const PrepResult r = prep_fidelity(p, n);
            t.add_row({p.f, p.q, p.eps, static_cast<long long>(n), r.fidelity, r.success});
        }
    }
    return t;
}

inline Table purify_meas_table(const RunConfig& cfg) {
    Table t{{}, {"f", "q", "eps", "m", "noise", "success"}, {}};
    for (const auto& p : param_grid(cfg)) {
        for (int m : cfg.depths) {
            const MeasResult r = meas_purified(p, m);
            t.add_row({p.f, p.q, p.eps, static_cast<long long>(m), r.noise, r.success});
        }
    }
    return t;
}

inline Table fixed_point_table(const RunConfig& cfg) {
    Table t{{}, {"f", "q", "eps", "D", "d", "f_inf", "q_inf"}, {}};
    for (const auto& p : param_grid(cfg)) {
        const FixedPoint fp = fixed_point(p);
        t.add_row({p.f, p.q, p.eps, fp.D, fp.d, fp.f_inf, fp.q_inf});
    }
    return t;
}

inline bool balanced(const SpamParams& p) { return std::abs((1.0 - p.f) - p.q) < 1e-12; }

inline Table swap_table(const RunConfig& cfg) {
    Table t{{}, {"f", "q", "eps", "m", "fidelity"}, {}};
    for (const auto& p : param_grid(cfg)) {
        for (int m : cfg.depths) {
            double fid = 0.0;
            if (p.eps == 0.0) {
                fid = swap_fidelity(p, m);
            } else {
                const Diagonals r = meas_diagonals(p, m);
                fid = swap_fidelity_from_diagonals(r.first, r.second);
            }
            t.add_row({p.f, p.q, p.eps, static_cast<long long>(m), fid});
        }
    }
    return t;
}

inline OutcomeDistribution parse_distribution(const std::string& text, bool counts) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(std::string("cannot parse outcome JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw InvalidParams("outcome JSON must be an object with keys p00, p01, p10, p11");
    }
    double v[4];
    const char* keys[4] = {"p00", "p01", "p10", "p11"};
    for (int i = 0; i < 4; ++i) {
        if (!j.contains(keys[i]) || !j[keys[i]].is_number()) {
            throw InvalidParams(std::string("outcome JSON lacks numeric '") + keys[i] + "'");
        }
        v[i] = j[keys[i]].get<double>();
    }
    return counts ? OutcomeDistribution::from_counts(v[0], v[1], v[2], v[3])
                  : OutcomeDistribution::from_probabilities(v[0], v[1], v[2], v[3]);
}

struct VerificationCase {
    int id;
    SpamParams params;
};

inline std::vector<VerificationCase> verification_cases() {
    return {{1, {0.9, 0.1, 0.0}},
            {2, {0.9, 0.05, 0.01}},
            {3, {0.97, 0.05, 0.03}},
            {4, {0.95, 0.05, 0.05}},
            {5, {0.99, 0.05, 0.1}}};
}

inline Table meas_purification_reference() {
    Table t{{"table: measurement purification with balanced noise 1-f=q and ideal CNOTs",
             "noise is q^(m) = trace distance of the purified effect from the ideal projector"},
            {"q", "m", "noise", "success", "noise_display", "success_display"},
            {}};
    for (double q : {0.25, 0.2, 0.15, 0.1, 0.05}) {
        const SpamParams p = SpamParams::make(1.0 - q, q, 0.0);
        for (int m = 0; m <= 2; ++m) {
            const MeasResult r = meas_purified(p, m);
            t.add_row({q, static_cast<long long>(m), r.noise, r.success, format_fixed(r.noise, 3),
                       format_fixed(r.success, 3)});
        }
    }
    return t;
}

inline Table critical_epsilon_reference() {
    Table t{{"table: critical CNOT error rate for balanced noise 1-f=q"},
            {"one_minus_f", "eps_c", "eps_c_display"},
            {}};
    for (double e : {0.0, 0.01, 0.03, 0.05, 0.07, 0.1}) {
        const double ec = critical_epsilon(1.0 - e);
        t.add_row({e, ec, format_fixed(ec, 4)});
    }
    return t;
}

inline Table verification_reference() {
    Table t{{"table: verification outcomes and purified preparation fidelity per case"},
            {"case", "f", "q", "eps", "quantity", "value", "display"},
            {}};
    for (const auto& c : verification_cases()) {
        const auto& p = c.params;
        const OutcomeDistribution d = predict_probs(p);
        auto row = [&](const char* name, double v, int decimals) {
            t.add_row({static_cast<long long>(c.id), p.f, p.q, p.eps, std::string(name), v, format_fixed(v, decimals)});
        };
        row("p01", d.p01, 4);
        row("p10", d.p10, 4);
        row("p11", d.p11, 4);
        row("f1", prep_fidelity(p, 1).fidelity, 3);
        row("f2", prep_fidelity(p, 2).fidelity, 3);
        row("f3", prep_fidelity(p, 3).fidelity, 3);
        row("f_inf", fixed_point(p).f_inf, 3);
    }
    return t;
}

inline Table distillation_reference() {
    Table t{{"table: copies needed to distill one ebit above fidelity 0.999, 1-f=q=0.05, ideal CNOTs"},
            {"F0", "n", "distillable", "rounds", "copies", "first_success", "copies_display", "success_display"},
            {}};
    const SpamParams p = SpamParams::make(0.95, 0.05, 0.0);
    for (double F0 : {0.6, 0.7, 0.8, 0.9}) {
        for (int n = 0; n <= 4; ++n) {
            const DistillationTrace tr = copies_needed(p, n, F0);
            if (tr.distillable) {
                t.add_row({F0, static_cast<long long>(n), true, static_cast<long long>(tr.rounds.size()), tr.copies,
                           tr.first_success(), format_sci(tr.copies, 3), format_fixed(tr.first_success(), 3)});
            } else {
                t.add_row({F0, static_cast<long long>(n), false, 0LL, std::nan(""), std::nan(""),
                           std::string("undistillable"), std::string("")});
            }
        }
    }
    return t;
}

inline int run_tables(const RunConfig& cfg, std::ostream& err) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.output.value_or("tables");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
    const std::string ext = cfg.format == Format::json ? ".json" : ".csv";
    const std::pair<const char*, Table> tables[] = {
        {"meas_purification", meas_purification_reference()},
        {"critical_epsilon", critical_epsilon_reference()},
        {"verification", verification_reference()},
        {"distillation_copies", distillation_reference()},
    };
    for (const auto& [name, table] : tables) {
        const fs::path path = dir / (std::string(name) + ext);
        emit_file(table, cfg.format, path.string());
        err << "wrote " << path.string() << '\n';
    }
    return kOk;
}

} // namespace detail

inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        switch (cfg.command) {
        case Command::purify_prep:
            detail::write_table(detail::purify_prep_table(cfg), cfg, out, err);
            return kOk;
        case Command::purify_meas:
            detail::write_table(detail::purify_meas_table(cfg), cfg, out, err);
            return kOk;
        case Command::fixed_point:
            detail::write_table(detail::fixed_point_table(cfg), cfg, out, err);
            return kOk;
        case Command::swap:
            detail::write_table(detail::swap_table(cfg), cfg, out, err);
            return kOk;
        case Command::condition: {
            Table t{{}, {"f", "q", "eps", "purifiable", "eps_c"}, {}};
            for (const auto& p : detail::param_grid(cfg)) {
                const bool ok = purification_condition(p);
                const bool bal = detail::balanced(p);
                const double ec = bal ? critical_epsilon(p.f) : std::nan("");
                std::string line = ok ? "purifiable" : "not purifiable";
                if (bal) {
                    line += " (eps_c = " + format_fixed(ec, 4) + ")";
                }
                (cfg.output ? err : out) << line << '\n';
                t.add_row({p.f, p.q, p.eps, ok, ec});
            }
            if (cfg.output) {
                detail::write_table(t, cfg, out, err);
            }
            return kOk;
        }
        case Command::verify: {
            if (cfg.probs.empty() == cfg.counts.empty()) {
                throw InvalidParams("verify needs exactly one of --probs or --counts");
            }
            const bool counts = !cfg.counts.empty();
            const OutcomeDistribution dist = detail::parse_distribution(counts ? cfg.counts : cfg.probs, counts);
            InferOptions opt;
            opt.seed = cfg.seed;
            const InferResult r = infer_params(dist, opt);
            const double nan = std::nan("");
            Table t{{},
                    {"p00", "p01", "p10", "p11", "f", "q", "eps", "residual", "consistent", "ambiguous", "alt_f",
                     "alt_q", "alt_eps"},
                    {}};
            t.add_row({dist.p00, dist.p01, dist.p10, dist.p11, r.params.f, r.params.q, r.params.eps, r.residual,
                       r.consistent, r.ambiguous, r.alternative ? r.alternative->f : nan,
                       r.alternative ? r.alternative->q : nan, r.alternative ? r.alternative->eps : nan});
            detail::write_table(t, cfg, out, err);
            err << "f=" << format_fixed(r.params.f, 4) << " q=" << format_fixed(r.params.q, 4)
                << " eps=" << format_fixed(r.params.eps, 4) << " residual=" << format_number(r.residual) << '\n';
            if (!r.consistent) {
                err << "flagged: outcomes are inconsistent with the verification model (residual above "
                    << format_number(opt.residual_threshold) << ")\n";
                return kFlagged;
            }
            if (r.ambiguous) {
                err << "flagged: parameters are not uniquely identified\n";
                return kFlagged;
            }
            return kOk;
        }
        case Command::distill: {
            Table t{{},
                    {"f", "q", "eps", "n", "F0", "target", "threshold", "distillable", "rounds", "final_fidelity",
                     "copies", "first_success"},
                    {}};
            int undistillable = 0;
            for (const auto& p : detail::param_grid(cfg)) {
                for (int n : cfg.depths) {
                    for (double F0 : cfg.werner) {
                        const DistillationTrace tr = copies_needed(p, n, F0, cfg.target);
                        const double nan = std::nan("");
                        undistillable += tr.distillable ? 0 : 1;
                        t.add_row({p.f, p.q, p.eps, static_cast<long long>(n), F0, cfg.target, tr.threshold,
                                   tr.distillable, static_cast<long long>(tr.rounds.size()),
                                   tr.distillable ? tr.final_fidelity : nan, tr.distillable ? tr.copies : nan,
                                   tr.distillable ? tr.first_success() : nan});
                    }
                }
            }
            detail::write_table(t, cfg, out, err);
            if (undistillable > 0) {
                err << "flagged: " << undistillable << " requested cell(s) undistillable (F0 <= threshold)\n";
                return kFlagged;
            }
            return kOk;
        }
        case Command::tables:
            return detail::run_tables(cfg, err);
        case Command::oracle_check: {
            Table t{{}, {"check", "cases", "max_deviation", "tolerance", "pass"}, {}};
            bool all = true;
            for (const auto& c : run_crosschecks()) {
                all = all && c.passed();
                t.add_row({c.name, static_cast<long long>(c.cases), c.max_deviation, c.tolerance, c.passed()});
            }
            detail::write_table(t, cfg, out, err);
            err << (all ? "all oracle checks passed\n" : "flagged: oracle deviation above tolerance\n");
            return all ? kOk : kFlagged;
        }
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    return kInvalidInput;
}

/// parse_args + run.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    const ParseOutcome parsed = parse_args(argc, argv, out, err);
    if (!parsed.config) {
        return parsed.exit_code;
    }
    return run(*parsed.config, out, err);
}

} // namespace spampur::cli
