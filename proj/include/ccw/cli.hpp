/*
 * This file is part of ccwsim
 *
 * Copyright 2026 ccwsim contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef CCW_CLI_HPP
#define CCW_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ccw/curves.hpp"
#include "ccw/engine.hpp"
#include "ccw/errors.hpp"
#include "ccw/experiments.hpp"
#include "ccw/keyval.hpp"
#include "ccw/person_period.hpp"
#include "ccw/simulate.hpp"
#include "ccw/version.hpp"

namespace ccw {

namespace cli_detail {

inline std::string num_str(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

/// Deterministic run manifest: config echo, seed, version. No timestamps
/// and no execution-only knobs (thread count), so identical configs give
/// byte-identical manifests.
inline void write_manifest(const std::string& path, const ManifestEntries& entries) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const auto& [key, value] : entries) out << key << "=" << value << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

struct TreatmentCli {
    double p_c1 = 0.5;
    double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0, p20 = 0.0, p21 = 0.0;

    TreatmentCli() {
        const TreatmentModel def = TreatmentModel::defaults();
        p_c1 = def.p_c1;
        p00 = def.p_init[0][0];
        p01 = def.p_init[0][1];
        p10 = def.p_init[1][0];
        p11 = def.p_init[1][1];
        p20 = def.p_init[2][0];
        p21 = def.p_init[2][1];
    }

    TreatmentModel to_model() const {
        TreatmentModel tm;
        tm.p_c1 = p_c1;
        tm.p_init = {{{p00, p01}, {p10, p11}, {p20, p21}}};
        tm.validate();
        return tm;
    }

    void add_options(CLI::App* cmd) {
        cmd->add_option("--p-c1", p_c1, "P(C=1) at baseline")->capture_default_str();
        cmd->add_option("--p-init-0-0", p00, "P(initiate at period 0 | C=0)")
            ->capture_default_str();
        cmd->add_option("--p-init-0-1", p01, "P(initiate at period 0 | C=1)")
            ->capture_default_str();
        cmd->add_option("--p-init-1-0", p10, "P(initiate at period 1 | C=0)")
            ->capture_default_str();
        cmd->add_option("--p-init-1-1", p11, "P(initiate at period 1 | C=1)")
            ->capture_default_str();
        cmd->add_option("--p-init-2-0", p20, "P(initiate at period 2 | C=0)")
            ->capture_default_str();
        cmd->add_option("--p-init-2-1", p21, "P(initiate at period 2 | C=1)")
            ->capture_default_str();
    }

    void manifest(ManifestEntries& entries) const {
        entries.emplace_back("p_c1", num_str(p_c1));
        entries.emplace_back("p_init_0_0", num_str(p00));
        entries.emplace_back("p_init_0_1", num_str(p01));
        entries.emplace_back("p_init_1_0", num_str(p10));
        entries.emplace_back("p_init_1_1", num_str(p11));
        entries.emplace_back("p_init_2_0", num_str(p20));
        entries.emplace_back("p_init_2_1", num_str(p21));
    }
};

struct ScenarioCli {
    std::string name = "base";
    std::string config_path;

    void add_options(CLI::App* cmd) {
        auto* name_opt =
            cmd->add_option("--scenario", name, "Built-in outcome model: base, A..E")
                ->capture_default_str();
        cmd->add_option("--scenario-config", config_path,
                        "key=value file defining a custom outcome model")
            ->excludes(name_opt);
    }

    ScenarioSpec resolve() const {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw DataError("cannot open '" + config_path + "' for reading");
            return scenario_from_keyvalues(read_key_values(in));
        }
        return find_scenario(name);
    }

    void manifest(ManifestEntries& entries, const ScenarioSpec& spec) const {
        entries.emplace_back("scenario", spec.name);
        entries.emplace_back("intercept", num_str(spec.intercept));
        entries.emplace_back("beta_c", num_str(spec.beta_c));
        entries.emplace_back("beta_x", num_str(spec.beta_x));
        entries.emplace_back("beta_cumx", num_str(spec.beta_cumx));
        entries.emplace_back("beta_prevx", num_str(spec.beta_prevx));
        entries.emplace_back("onset_period", std::to_string(spec.onset_period));
    }
};

struct InterventionCli {
    std::string kind = "natural";
    int window_start = 0;
    int window_end = kPeriods;
    bool marginal_history = false;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--intervention", kind,
                        "natural, start_at_0, start_at_1, feasible, impossible, "
                        "delayed_window")
            ->capture_default_str();
        cmd->add_option("--window-start", window_start,
                        "delayed_window: first period initiation is allowed")
            ->capture_default_str();
        cmd->add_option("--window-end", window_end,
                        "delayed_window: period of forced initiation")
            ->capture_default_str();
        cmd->add_flag("--marginal-history", marginal_history,
                      "impossible: pool pseudo-history donors across C strata");
    }

    Intervention resolve() const {
        if (kind == "natural") return Intervention::natural();
        if (kind == "start_at_0") return Intervention::start_at_0();
        if (kind == "start_at_1") return Intervention::start_at_1();
        if (kind == "feasible") return Intervention::feasible();
        if (kind == "impossible") return Intervention::impossible(marginal_history);
        if (kind == "delayed_window") {
            return Intervention::delayed_window(window_start, window_end);
        }
        throw ConfigError("unknown intervention '" + kind + "'");
    }
};

inline void run_simulate(const ScenarioCli& scenario_cli, const TreatmentCli& tm_cli,
                         const InterventionCli& iv_cli, std::int64_t n,
                         std::uint64_t seed, int threads, const std::string& out) {
    const ScenarioSpec spec = scenario_cli.resolve();
    const TreatmentModel tm = tm_cli.to_model();
    const Intervention iv = iv_cli.resolve();
    Cohort cohort;
    cohort.covariate_names = {"c"};
    cohort.paths = simulate_intervention(spec, tm, iv, n, seed, threads);
    export_cohort_csv(cohort, out);

    ManifestEntries entries{{"tool", "ccwsim"},
                            {"version", kVersion},
                            {"command", "simulate"}};
    scenario_cli.manifest(entries, spec);
    tm_cli.manifest(entries);
    entries.emplace_back("intervention", iv.label());
    entries.emplace_back("n", std::to_string(n));
    entries.emplace_back("seed", std::to_string(seed));
    entries.emplace_back("output", out);
    write_manifest(out + ".manifest", entries);
}

inline void run_analyze(const std::string& input, int window_end,
                        const std::string& scheme_name, int tolerance,
                        const std::string& out, const std::string& audit) {
    const WeightScheme scheme = weight_scheme_from_string(scheme_name);
    const Cohort cohort = parse_cohort_csv(input);
    const auto clones = estimate_weights(clone_and_censor(cohort.paths, window_end),
                                         scheme, window_end, tolerance);
    const RiskEstimate primary = weighted_risk(clones, kPeriods);
    const RiskEstimate check = brute_force_risk(clones, kPeriods);

    std::ofstream risk_out(out);
    if (!risk_out) throw IoError("cannot open '" + out + "' for writing");
    risk_out << "method,risk,horizon,n,reps\n";
    risk_out << primary.method << "," << num_str(primary.risk) << "," << primary.horizon
             << "," << primary.n << "," << primary.reps << "\n";
    risk_out << check.method << "," << num_str(check.risk) << "," << check.horizon << ","
             << check.n << "," << check.reps << "\n";
    if (!risk_out) throw IoError("write failed for '" + out + "'");

    if (!audit.empty()) write_weight_audit(clones, audit);

    ManifestEntries entries{{"tool", "ccwsim"},
                            {"version", kVersion},
                            {"command", "analyze"},
                            {"input", input},
                            {"window_end", std::to_string(window_end)},
                            {"scheme", to_string(scheme)},
                            {"at_window_tolerance", std::to_string(tolerance)},
                            {"output", out}};
    if (!audit.empty()) entries.emplace_back("audit", audit);
    write_manifest(out + ".manifest", entries);
}

inline void run_table2_cmd(const TreatmentCli& tm_cli, std::int64_t n, int reps,
                           std::uint64_t seed, int threads, double tolerance,
                           bool paper_scale, const std::string& out_dir) {
    if (paper_scale) {
        n = 5000000;
        reps = 10;
    }
    const TreatmentModel tm = tm_cli.to_model();
    const auto rows = run_table2(tm, n, reps, seed, threads);
    const double tol = tolerance > 0.0 ? tolerance : mc_tolerance(n, reps);
    const Table3Report report = check_table3(rows, tol);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_table2_csv(rows, (dir / "table2.csv").string());
    write_table3_report(report, (dir / "table3_report.txt").string());

    ManifestEntries entries{{"tool", "ccwsim"},
                            {"version", kVersion},
                            {"command", "table2"}};
    tm_cli.manifest(entries);
    entries.emplace_back("n", std::to_string(n));
    entries.emplace_back("reps", std::to_string(reps));
    entries.emplace_back("seed", std::to_string(seed));
    entries.emplace_back("window_end", std::to_string(kStudyWindowEnd));
    entries.emplace_back("tolerance", num_str(tol));
    write_manifest((dir / "manifest.txt").string(), entries);
}

inline void run_curve(const std::string& dist_name, double never, double mu,
                      double sigma, double rate, const std::vector<double>& days,
                      int window_end, int resolution, const std::string& out) {
    StartDistribution dist;
    if (dist_name == "uniform") {
        dist = StartDistribution::uniform(never);
    } else if (dist_name == "normal") {
        dist = StartDistribution::normal(mu, sigma, never);
    } else if (dist_name == "early") {
        dist = StartDistribution::early(rate, never);
    } else if (dist_name == "late") {
        dist = StartDistribution::late(rate, never);
    } else if (dist_name == "empirical") {
        dist = StartDistribution::empirical(days, never);
    } else {
        throw ConfigError("unknown start distribution '" + dist_name + "'");
    }
    const InitiationCurve curve = initiation_curve(dist, window_end, resolution);
    write_curve_csv(curve, out);

    ManifestEntries entries{{"tool", "ccwsim"},
                            {"version", kVersion},
                            {"command", "curve"},
                            {"distribution", curve.label},
                            {"never", num_str(never)},
                            {"window_end", std::to_string(window_end)},
                            {"resolution", std::to_string(resolution)},
                            {"output", out}};
    write_manifest(out + ".manifest", entries);
}

inline void run_oracle(const ScenarioCli& scenario_cli, const TreatmentCli& tm_cli,
                       const InterventionCli& iv_cli, const std::string& start_label,
                       double p_c1, bool mc, std::int64_t n, int reps,
                       std::uint64_t seed, bool seed_given, int threads,
                       const std::string& out) {
    const ScenarioSpec spec = scenario_cli.resolve();
    std::string line;
    if (mc) {
        if (!seed_given) {
            throw ConfigError("--seed is required for Monte Carlo oracle runs");
        }
        const TreatmentModel tm = tm_cli.to_model();
        const Intervention iv = iv_cli.resolve();
        const RiskEstimate est = mc_risk(spec, tm, iv, n, reps, seed, threads);
        line = "method,scenario,intervention,n,reps,risk\n" + est.method + "," +
               spec.name + "," + iv.label() + "," + std::to_string(n) + "," +
               std::to_string(reps) + "," + num_str(est.risk) + "\n";
    } else {
        std::optional<int> start;
        if (start_label != "never") {
            try {
                start = std::stoi(start_label);
            } catch (const std::exception&) {
                throw ConfigError("--start must be a period index or 'never', got '" +
                                  start_label + "'");
            }
        }
        const double risk = closed_form_risk(spec, p_c1, start);
        line = "method,scenario,exposure_path,risk\nclosed_form," + spec.name + "," +
               start_label + "," + num_str(risk) + "\n";
    }
    std::cout << line;
    if (!out.empty()) {
        std::ofstream file(out);
        if (!file) throw IoError("cannot open '" + out + "' for writing");
        file << line;
        if (!file) throw IoError("write failed for '" + out + "'");
    }
}

} // namespace cli_detail

/// Entry point behind the ccwsim binary. Returns a categorized exit code:
/// 0 success, 1 usage, 2 configuration, 3 data, 4 estimation
/// (positivity, degenerate stratum, emptied risk set), 5 I/O.
inline int run_cli(std::vector<std::string> args) {
    using namespace cli_detail;

    CLI::App app{"Discrete-time cohort simulator and clone-censor-weight "
                 "estimation engine"};
    app.name("ccwsim");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    // Options unknown to a subcommand (notably --config) climb to the app.
    app.fallthrough();
    app.set_config("--config", "",
                   "Read options from a config file, one [section] per subcommand");

    // simulate
    auto* sim = app.add_subcommand("simulate",
                                   "Simulate a cohort and write person-period CSV");
    ScenarioCli sim_scenario;
    TreatmentCli sim_tm;
    InterventionCli sim_iv;
    std::int64_t sim_n = 10000;
    std::uint64_t sim_seed = 0;
    int sim_threads = 1;
    std::string sim_out = "cohort.csv";
    sim_scenario.add_options(sim);
    sim_tm.add_options(sim);
    sim_iv.add_options(sim);
    sim->add_option("--n", sim_n, "Individuals to simulate")->capture_default_str();
    sim->add_option("--seed", sim_seed, "Master RNG seed")->required();
    sim->add_option("--threads", sim_threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    sim->add_option("--out", sim_out, "Output CSV path")->capture_default_str();
    sim->callback([&] {
        run_simulate(sim_scenario, sim_tm, sim_iv, sim_n, sim_seed, sim_threads,
                     sim_out);
    });

    // analyze
    auto* ana = app.add_subcommand(
        "analyze", "Clone, censor, weight and estimate risk from person-period CSV");
    std::string ana_input;
    int ana_window = 1;
    std::string ana_scheme = "limited";
    int ana_tolerance = 0;
    std::string ana_out = "risk.csv";
    std::string ana_audit;
    ana->add_option("--input", ana_input, "Person-period CSV to analyze")->required();
    ana->add_option("--window", ana_window, "Initiation window end (period index)")
        ->capture_default_str();
    ana->add_option("--scheme", ana_scheme, "limited or all_initiator")
        ->capture_default_str();
    ana->add_option("--tolerance", ana_tolerance,
                    "Periods before the window end still counted as window "
                    "initiation")
        ->capture_default_str();
    ana->add_option("--out", ana_out, "Risk estimate CSV path")->capture_default_str();
    ana->add_option("--audit", ana_audit, "Optional per-clone weight audit CSV path");
    ana->callback([&] {
        run_analyze(ana_input, ana_window, ana_scheme, ana_tolerance, ana_out,
                    ana_audit);
    });

    // table2
    auto* tab = app.add_subcommand(
        "table2", "Run all catalog scenarios: both weighting schemes plus the four "
                  "intervention oracles");
    TreatmentCli tab_tm;
    std::int64_t tab_n = 200000;
    int tab_reps = 5;
    std::uint64_t tab_seed = 0;
    int tab_threads = 1;
    double tab_tolerance = 0.0;
    bool tab_paper_scale = false;
    std::string tab_out = "table2_out";
    tab_tm.add_options(tab);
    tab->add_option("--n", tab_n, "Individuals per replicate")->capture_default_str();
    tab->add_option("--reps", tab_reps, "Replicates")->capture_default_str();
    tab->add_option("--seed", tab_seed, "Master RNG seed")->required();
    tab->add_option("--threads", tab_threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    tab->add_option("--tolerance", tab_tolerance,
                    "Agreement tolerance for the decision matrix (default: "
                    "4 SE of a proportion)");
    tab->add_flag("--full-scale", tab_paper_scale,
                  "Use 5,000,000 individuals and 10 replicates");
    tab->add_option("--out", tab_out, "Output directory")->capture_default_str();
    tab->callback([&] {
        run_table2_cmd(tab_tm, tab_n, tab_reps, tab_seed, tab_threads, tab_tolerance,
                       tab_paper_scale, tab_out);
    });

    // curve
    auto* cur = app.add_subcommand(
        "curve", "Cumulative initiation curve under an initiate-by-window regimen");
    std::string cur_dist = "uniform";
    double cur_never = 0.0;
    double cur_mu = 15.0;
    double cur_sigma = 5.0;
    double cur_rate = 0.1;
    std::vector<double> cur_days;
    int cur_window = 30;
    int cur_resolution = 1;
    std::string cur_out = "curve.csv";
    cur->add_option("--dist", cur_dist, "uniform, normal, early, late, empirical")
        ->capture_default_str();
    cur->add_option("--never", cur_never, "Share never initiating naturally")
        ->capture_default_str();
    cur->add_option("--mu", cur_mu, "normal: mean start day")->capture_default_str();
    cur->add_option("--sigma", cur_sigma, "normal: start-day SD")->capture_default_str();
    cur->add_option("--rate", cur_rate, "early/late: shape rate")->capture_default_str();
    cur->add_option("--days", cur_days, "empirical: start days");
    cur->add_option("--window", cur_window, "Window end in days")->capture_default_str();
    cur->add_option("--resolution", cur_resolution, "Sampling step in days")
        ->capture_default_str();
    cur->add_option("--out", cur_out, "Output CSV path")->capture_default_str();
    cur->callback([&] {
        run_curve(cur_dist, cur_never, cur_mu, cur_sigma, cur_rate, cur_days,
                  cur_window, cur_resolution, cur_out);
    });

    // oracle
    auto* ora = app.add_subcommand(
        "oracle", "Closed-form or Monte Carlo risk for a chosen exposure path");
    ScenarioCli ora_scenario;
    TreatmentCli ora_tm;
    InterventionCli ora_iv;
    std::string ora_start = "never";
    double ora_p_c1 = 0.5;
    bool ora_mc = false;
    std::int64_t ora_n = 200000;
    int ora_reps = 5;
    std::uint64_t ora_seed = 0;
    int ora_threads = 1;
    std::string ora_out;
    ora_scenario.add_options(ora);
    ora_tm.add_options(ora);
    ora_iv.add_options(ora);
    ora->add_option("--start", ora_start,
                    "Closed form: deterministic start period or 'never'")
        ->capture_default_str();
    ora->add_option("--p-c1-closed", ora_p_c1,
                    "Closed form: P(C=1) used in the mixture")
        ->capture_default_str();
    ora->add_flag("--mc", ora_mc, "Monte Carlo instead of closed form");
    ora->add_option("--n", ora_n, "MC: individuals per replicate")
        ->capture_default_str();
    ora->add_option("--reps", ora_reps, "MC: replicates")->capture_default_str();
    auto* seed_opt = ora->add_option("--seed", ora_seed, "MC: master RNG seed");
    ora->add_option("--threads", ora_threads, "MC: worker threads")
        ->capture_default_str();
    ora->add_option("--out", ora_out, "Optional output CSV path");
    ora->callback([&] {
        run_oracle(ora_scenario, ora_tm, ora_iv, ora_start, ora_p_c1, ora_mc, ora_n,
                   ora_reps, ora_seed, seed_opt->count() > 0, ora_threads, ora_out);
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& err) {
        std::cerr << "ccwsim: configuration error: " << err.what() << "\n";
        return 2;
    } catch (const DataError& err) {
        std::cerr << "ccwsim: data error: " << err.what() << "\n";
        return 3;
    } catch (const PositivityError& err) {
        std::cerr << "ccwsim: positivity violation: " << err.what() << "\n";
        return 4;
    } catch (const DegenerateStratumError& err) {
        std::cerr << "ccwsim: degenerate stratum: " << err.what() << "\n";
        return 4;
    } catch (const EstimationError& err) {
        std::cerr << "ccwsim: estimation error: " << err.what() << "\n";
        return 4;
    } catch (const IoError& err) {
        std::cerr << "ccwsim: i/o error: " << err.what() << "\n";
        return 5;
    } catch (const std::filesystem::filesystem_error& err) {
        std::cerr << "ccwsim: i/o error: " << err.what() << "\n";
        return 5;
    }
    return 0;
}

} // namespace ccw

#endif // CCW_CLI_HPP
