#ifndef SYMTEST_HARNESS_CLI_HPP
#define SYMTEST_HARNESS_CLI_HPP

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symtest/harness/experiment.hpp"
#include "symtest/power/bounds.hpp"

namespace symtest {

namespace detail {

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return experiment_config_from_json(j);
}

inline void write_or_print(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    out << text;
}

}  // namespace detail

// Subcommands: `test` (single test, prints the p-value), `experiment`
// (grid runner), `powerbound` (power lower-bound calculator), `pvals`
// (raw p-values per replication). Exit codes: 0 success, 1 runtime failure,
// 2 configuration errors.
inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Randomization tests for group symmetry of conditional distributions"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "json", data_path, schema_path;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment configuration");
        cmd->add_option("--seed", seed_override, "override the master seed")
            ->each([&](const std::string&) { has_seed_override = true; });
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    };

    // --- experiment ---------------------------------------------------------
    CLI::App* experiment = app.add_subcommand("experiment", "run a replicated experiment grid");
    add_common(experiment);
    experiment->add_option("--format", format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // --- pvals --------------------------------------------------------------
    CLI::App* pvals = app.add_subcommand("pvals", "emit raw p-values per replication");
    add_common(pvals);

    // --- test ---------------------------------------------------------------
    CLI::App* single = app.add_subcommand("test", "run one test and print its p-value");
    add_common(single);
    std::string design = "gauss_cov", stat_kind = "fuse", families_arg = "gaussian,laplace";
    std::string variant = "R1", sampler = "approx", scope = "y_only", procedure = "crt";
    std::string group = "so2_equiv", mode = "transverse_2d";
    int n = 100, d = 3, num_rounds = 100, grid_size = 10;
    double p = 0.0, s = 0.0, alpha = 0.05, fixed_sigma = 0.0;
    bool reuse = true, vstat = false, shuffle = false;
    single->add_option("--design", design, "synthetic design or physics_csv");
    single->add_option("--n", n, "sample size");
    single->add_option("--d", d, "data dimension");
    single->add_option("--p", p, "design parameter p");
    single->add_option("--s", s, "design parameter s");
    single->add_option("--B", num_rounds, "randomization rounds");
    single->add_option("--alpha", alpha, "test level");
    single->add_option("--stat", stat_kind, "statistic: mmd2_u, mmd2_v, fuse, sk");
    single->add_option("--families", families_arg, "comma-separated kernel families");
    single->add_option("--grid-size", grid_size, "bandwidths per family");
    single->add_option("--fixed-sigma", fixed_sigma, "fixed bandwidth (overrides the grid)");
    single->add_flag("--vstat", vstat, "use the biased estimator components");
    single->add_option("--variant", variant, "conditioning variant: R1, R2, R3");
    single->add_option("--sampler", sampler, "approx, exact_transitive, exact_orbit_kernel");
    single->add_option("--scope", scope, "data scope: pair or y_only");
    single->add_option("--procedure", procedure, "crt, baseline, marginal, marginal_baseline");
    single->add_flag("--reuse,!--no-reuse", reuse, "reuse the comparison randomization");
    single->add_option("--data", data_path, "jet constituent CSV (physics_csv design)");
    single->add_option("--schema", schema_path, "JSON column-name map for --data");
    single->add_option("--mode", mode, "physics feature mode: transverse_2d or four_momentum");
    single->add_option("--group", group, "physics group to test");
    single->add_flag("--shuffle", shuffle, "permute responses before testing");

    // --- powerbound ---------------------------------------------------------
    CLI::App* bound = app.add_subcommand("powerbound", "finite-sample power lower bound");
    PowerBoundInputs pb;
    double beta = 0.0;
    bound->add_option("--n", pb.n, "sample size")->required();
    bound->add_option("--B", pb.num_rounds, "randomization rounds");
    bound->add_option("--alpha", pb.alpha, "test level");
    bound->add_option("--nu", pb.nu, "kernel sup-norm root");
    bound->add_option("--eta", pb.eta, "confidence parameter");
    bound->add_option("--delta", pb.delta, "separation")->required();
    bound->add_option("--L", pb.L, "kernel component count (adaptive statistics)");
    bound->add_option("--beta", beta, "also report the separation threshold for this power");
    bound->add_option("--out", out_path, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (bound->parsed()) {
            const PowerBoundReport rep = power_lower_bound(pb);
            nlohmann::json j{{"n", pb.n},
                             {"randomizations", pb.num_rounds},
                             {"alpha", pb.alpha},
                             {"nu", pb.nu},
                             {"eta", pb.eta},
                             {"delta", pb.delta},
                             {"L", pb.L},
                             {"r_n", rep.r_n},
                             {"success_prob", rep.success},
                             {"rejection_quantile", rep.rejection_quantile},
                             {"power_lower_bound", rep.bound},
                             {"separation_below_threshold", rep.separation_below_threshold}};
            if (beta > 0.0)
                j["delta_threshold"] =
                    delta_threshold(beta, pb.num_rounds, pb.alpha, pb.n, pb.nu, pb.eta);
            detail::write_or_print(j.dump(2) + "\n", out_path);
            return 0;
        }

        if (experiment->parsed() || pvals->parsed()) {
            require(!config_path.empty(), "--config is required");
            ExperimentConfig cfg = detail::load_config(config_path);
            if (has_seed_override) cfg.seed = seed_override;
            if (threads > 0) cfg.threads = threads;
            const bool keep_pvals = pvals->parsed();
            const RejectionRateReport report = run_experiment(cfg, keep_pvals);
            if (pvals->parsed()) {
                std::ostringstream csv;
                csv.precision(17);
                csv << "n,p,s,replication,p_value\n";
                for (const auto& cell : report.cells) {
                    for (std::size_t r = 0; r < cell.p_values.size(); ++r)
                        csv << cell.n << ',' << cell.p << ',' << cell.s << ',' << r << ','
                            << cell.p_values[r] << '\n';
                }
                detail::write_or_print(csv.str(), out_path);
            } else if (format == "csv") {
                detail::write_or_print(report_csv(report), out_path);
            } else {
                detail::write_or_print(to_json(report).dump(2) + "\n", out_path);
            }
            return 0;
        }

        if (single->parsed()) {
            ExperimentConfig cfg;
            if (!config_path.empty()) cfg = detail::load_config(config_path);
            cfg.design = data_path.empty() ? design : "physics_csv";
            cfg.procedure = procedure_from_string(procedure);
            cfg.variant = variant_from_string(variant);
            cfg.sampler = sampler_kind_from_string(sampler);
            cfg.scope = data_scope_from_string(scope);
            cfg.reuse = reuse;
            cfg.d = d;
            cfg.num_rounds = num_rounds;
            cfg.alpha = alpha;
            cfg.shuffle = shuffle;
            if (has_seed_override) cfg.seed = seed_override;
            cfg.statistic.kind = stat_kind_from_string(stat_kind);
            cfg.statistic.grid_size = grid_size;
            cfg.statistic.use_vstat = vstat;
            cfg.statistic.fixed_sigma = fixed_sigma;
            cfg.statistic.families.clear();
            std::stringstream fam_ss(families_arg);
            std::string fam;
            while (std::getline(fam_ss, fam, ','))
                cfg.statistic.families.push_back(kernel_family_from_string(fam));

            const LeadingPairDataset* physics_ptr = nullptr;
            std::optional<LeadingPairDataset> physics_data;
            if (!data_path.empty()) {
                PhysicsSource ph;
                ph.path = data_path;
                ph.group = group;
                ph.mode = mode == "four_momentum" ? JetFeatureMode::four_momentum
                                                  : JetFeatureMode::transverse_2d;
                if (!schema_path.empty()) {
                    std::ifstream sin(schema_path);
                    if (!sin) throw std::invalid_argument("cannot open schema: " + schema_path);
                    nlohmann::json sj;
                    sin >> sj;
                    ph.schema.event_id = sj.value("event_id", ph.schema.event_id);
                    ph.schema.jet_index = sj.value("jet_index", ph.schema.jet_index);
                    ph.schema.pt = sj.value("pt", ph.schema.pt);
                    ph.schema.eta = sj.value("eta", ph.schema.eta);
                    ph.schema.phi = sj.value("phi", ph.schema.phi);
                    ph.schema.energy = sj.value("E", ph.schema.energy);
                    ph.schema.p1 = sj.value("p1", ph.schema.p1);
                    ph.schema.p2 = sj.value("p2", ph.schema.p2);
                    ph.schema.p3 = sj.value("p3", ph.schema.p3);
                }
                cfg.physics = ph;
                const auto records = load_constituents(ph.path, ph.schema);
                physics_data = leading_pairs(records, ph.mode);
                if (n <= 0 || n > physics_data->x.rows())
                    n = static_cast<int>(physics_data->x.rows());
                physics_ptr = &*physics_data;
            }

            const TestResult result =
                run_single_replication(cfg, n, p, s, derive_seed(cfg.seed, 0, 0), physics_ptr);
            std::cout << "p_value " << result.p_value << "\n"
                      << "observed_stat " << result.observed_stat << "\n"
                      << "reject " << (result.reject ? "true" : "false") << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace symtest

#endif
