#ifndef SYMTEST_HARNESS_EXPERIMENT_HPP
#define SYMTEST_HARNESS_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "symtest/common.hpp"
#include "symtest/physics/jets.hpp"
#include "symtest/randomization/tests.hpp"
#include "symtest/synth/designs.hpp"

namespace symtest {

// Symmetric 95% score interval for a binomial proportion.
struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

inline WilsonInterval wilson_interval(int successes, int trials, double z = 1.959963984540054) {
    require(trials >= 1, "interval needs at least one trial");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    // the interval always contains the point estimate
    return {std::min(phat, std::max(0.0, center - half)),
            std::max(phat, std::min(1.0, center + half))};
}

enum class TestProcedure { crt, baseline, marginal, marginal_baseline };

inline std::string to_string(TestProcedure p) {
    switch (p) {
        case TestProcedure::crt: return "crt";
        case TestProcedure::baseline: return "baseline";
        case TestProcedure::marginal: return "marginal";
        case TestProcedure::marginal_baseline: return "marginal_baseline";
    }
    return "?";
}

inline TestProcedure procedure_from_string(const std::string& s) {
    if (s == "crt") return TestProcedure::crt;
    if (s == "baseline") return TestProcedure::baseline;
    if (s == "marginal") return TestProcedure::marginal;
    if (s == "marginal_baseline") return TestProcedure::marginal_baseline;
    throw std::invalid_argument("unknown test procedure: " + s);
}

struct PhysicsSource {
    std::string path;
    JetCsvSchema schema;
    JetFeatureMode mode = JetFeatureMode::transverse_2d;
    std::string group = "so2_equiv";  // so2_equiv | lorentz_equiv | paired_rot | unpaired_rot | so4
};

struct ExperimentConfig {
    std::string design = "gauss_cov";
    TestProcedure procedure = TestProcedure::crt;
    Variant variant = Variant::r1_resample_gamma;
    SamplerKind sampler = SamplerKind::approx_kernel_weighted;
    DataScope scope = DataScope::y_only;
    bool reuse = true;
    TestStatisticSpec statistic;
    int d = 3;
    std::vector<int> n_grid = {100};
    std::vector<double> p_grid = {0.0};
    std::vector<double> s_grid = {0.0};
    int replications = 1000;
    int num_rounds = 100;
    double alpha = 0.05;
    std::uint64_t seed = 20240101;
    int threads = 0;  // 0: hardware default
    bool shuffle = false;  // permute responses before testing (pairing designs)
    std::optional<PhysicsSource> physics;
};

struct CellResult {
    int n = 0;
    double p = 0.0;
    double s = 0.0;
    int replications = 0;
    int rejections = 0;
    int failures = 0;
    double rate = 0.0;
    WilsonInterval interval;
    double mean_p_value = 0.0;
    double wall_ms = 0.0;
    std::string first_error;
    std::vector<double> p_values;  // populated when keep_p_values is set
};

struct RejectionRateReport {
    ExperimentConfig config;
    std::vector<CellResult> cells;
    std::uint64_t config_hash = 0;
};

namespace detail {

inline int resolve_threads(int requested) {
    if (const char* env = std::getenv("SYMTEST_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON (de)serialization of configs and reports
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const TestStatisticSpec& s) {
    nlohmann::json families = nlohmann::json::array();
    for (auto f : s.families) families.push_back(to_string(f));
    return {{"kind", to_string(s.kind)},
            {"families", families},
            {"grid_size", s.grid_size},
            {"use_vstat", s.use_vstat},
            {"fixed_sigma", s.fixed_sigma}};
}

inline TestStatisticSpec statistic_spec_from_json(const nlohmann::json& j) {
    TestStatisticSpec s;
    if (j.contains("kind")) s.kind = stat_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("families")) {
        s.families.clear();
        for (const auto& f : j.at("families"))
            s.families.push_back(kernel_family_from_string(f.get<std::string>()));
    }
    s.grid_size = j.value("grid_size", s.grid_size);
    s.use_vstat = j.value("use_vstat", s.use_vstat);
    s.fixed_sigma = j.value("fixed_sigma", s.fixed_sigma);
    return s;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j{{"design", c.design},
                     {"test", to_string(c.procedure)},
                     {"variant", to_string(c.variant)},
                     {"sampler", to_string(c.sampler)},
                     {"scope", to_string(c.scope)},
                     {"reuse", c.reuse},
                     {"statistic", to_json(c.statistic)},
                     {"d", c.d},
                     {"grid", {{"n", c.n_grid}, {"p", c.p_grid}, {"s", c.s_grid}}},
                     {"replications", c.replications},
                     {"randomizations", c.num_rounds},
                     {"alpha", c.alpha},
                     {"seed", c.seed},
                     {"threads", c.threads},
                     {"shuffle", c.shuffle}};
    if (c.physics) {
        j["physics"] = {{"path", c.physics->path},
                        {"group", c.physics->group},
                        {"mode", c.physics->mode == JetFeatureMode::four_momentum
                                     ? "four_momentum"
                                     : "transverse_2d"},
                        {"schema",
                         {{"event_id", c.physics->schema.event_id},
                          {"jet_index", c.physics->schema.jet_index},
                          {"pt", c.physics->schema.pt},
                          {"eta", c.physics->schema.eta},
                          {"phi", c.physics->schema.phi},
                          {"E", c.physics->schema.energy},
                          {"p1", c.physics->schema.p1},
                          {"p2", c.physics->schema.p2},
                          {"p3", c.physics->schema.p3}}}};
    }
    return j;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.design = j.value("design", c.design);
    if (j.contains("test")) c.procedure = procedure_from_string(j.at("test").get<std::string>());
    if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("sampler"))
        c.sampler = sampler_kind_from_string(j.at("sampler").get<std::string>());
    if (j.contains("scope")) c.scope = data_scope_from_string(j.at("scope").get<std::string>());
    c.reuse = j.value("reuse", c.reuse);
    if (j.contains("statistic")) c.statistic = statistic_spec_from_json(j.at("statistic"));
    c.d = j.value("d", c.d);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("n")) c.n_grid = g.at("n").get<std::vector<int>>();
        if (g.contains("p")) c.p_grid = g.at("p").get<std::vector<double>>();
        if (g.contains("s")) c.s_grid = g.at("s").get<std::vector<double>>();
    }
    c.replications = j.value("replications", c.replications);
    c.num_rounds = j.value("randomizations", c.num_rounds);
    c.alpha = j.value("alpha", c.alpha);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.shuffle = j.value("shuffle", c.shuffle);
    if (j.contains("physics")) {
        PhysicsSource ph;
        const auto& p = j.at("physics");
        ph.path = p.at("path").get<std::string>();
        ph.group = p.value("group", ph.group);
        ph.mode = p.value("mode", std::string("transverse_2d")) == "four_momentum"
                      ? JetFeatureMode::four_momentum
                      : JetFeatureMode::transverse_2d;
        if (p.contains("schema")) {
            const auto& s = p.at("schema");
            ph.schema.event_id = s.value("event_id", ph.schema.event_id);
            ph.schema.jet_index = s.value("jet_index", ph.schema.jet_index);
            ph.schema.pt = s.value("pt", ph.schema.pt);
            ph.schema.eta = s.value("eta", ph.schema.eta);
            ph.schema.phi = s.value("phi", ph.schema.phi);
            ph.schema.energy = s.value("E", ph.schema.energy);
            ph.schema.p1 = s.value("p1", ph.schema.p1);
            ph.schema.p2 = s.value("p2", ph.schema.p2);
            ph.schema.p3 = s.value("p3", ph.schema.p3);
        }
        c.physics = ph;
    }
    require(c.replications >= 1, "replication count must be >= 1");
    require(!c.n_grid.empty(), "grid must contain at least one sample size");
    return c;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string dump = to_json(c).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// timing=false yields byte-stable output for determinism checks.
inline nlohmann::json to_json(const RejectionRateReport& rep, bool timing = true) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : rep.cells) {
        nlohmann::json jc{{"n", c.n},
                          {"p", c.p},
                          {"s", c.s},
                          {"replications", c.replications},
                          {"rejections", c.rejections},
                          {"failures", c.failures},
                          {"rate", c.rate},
                          {"wilson_lo", c.interval.lo},
                          {"wilson_hi", c.interval.hi},
                          {"mean_p_value", c.mean_p_value}};
        if (timing) jc["wall_ms"] = c.wall_ms;
        if (!c.first_error.empty()) jc["first_error"] = c.first_error;
        cells.push_back(jc);
    }
    return {{"config", to_json(rep.config)}, {"config_hash", rep.config_hash}, {"cells", cells}};
}

inline void write_report_json(const RejectionRateReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << to_json(rep).dump(2) << '\n';
}

inline std::string report_csv(const RejectionRateReport& rep, bool timing = true) {
    std::ostringstream out;
    out.precision(17);
    out << "design,test,n,p,s,replications,rejections,failures,rate,wilson_lo,wilson_hi,"
           "mean_p_value";
    if (timing) out << ",wall_ms";
    out << '\n';
    for (const auto& c : rep.cells) {
        out << rep.config.design << ',' << to_string(rep.config.procedure) << ',' << c.n << ','
            << c.p << ',' << c.s << ',' << c.replications << ',' << c.rejections << ','
            << c.failures << ',' << c.rate << ',' << c.interval.lo << ',' << c.interval.hi << ','
            << c.mean_p_value;
        if (timing) out << ',' << c.wall_ms;
        out << '\n';
    }
    return out.str();
}

inline void write_report_csv(const RejectionRateReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << report_csv(rep);
}

// ---------------------------------------------------------------------------
// Replication runners
// ---------------------------------------------------------------------------

namespace detail {

template <GroupAction A>
TestResult dispatch_conditional(const A& action, const PairedDataset<A>& ds,
                                const RandomizationScheme<A>& scheme, const ExperimentConfig& cfg,
                                std::uint64_t test_seed) {
    if (cfg.procedure == TestProcedure::baseline) {
        return baseline_permutation_test(action, ds, scheme, cfg.statistic, cfg.num_rounds,
                                         cfg.alpha, cfg.scope, test_seed);
    }
    return crt_symmetry_test(action, ds, scheme, cfg.statistic, cfg.num_rounds, cfg.alpha,
                             cfg.reuse, cfg.scope, test_seed);
}

template <GroupAction A>
TestResult run_conditional(const A& action, Matrix x, Matrix y, const ExperimentConfig& cfg,
                           std::uint64_t rep_seed,
                           std::function<typename A::Element(const Vector&, Rng&)> orbit_kernel =
                               nullptr) {
    Rng rng = make_rng(rep_seed, 1);
    const auto ds = make_paired_dataset(action, std::move(x), std::move(y), rng);
    RandomizationScheme<A> scheme;
    scheme.variant = cfg.variant;
    scheme.sampler = cfg.sampler;
    if (cfg.sampler == SamplerKind::exact_orbit_kernel) {
        require(static_cast<bool>(orbit_kernel),
                "design does not provide an exact orbit-kernel sampler");
        scheme.orbit_kernel = std::move(orbit_kernel);
    }
    return dispatch_conditional(action, ds, scheme, cfg, derive_seed(rep_seed, 2));
}

inline TestResult run_marginal(const Matrix& x, const ExperimentConfig& cfg, int dim,
                               std::uint64_t rep_seed) {
    const RotationAction action(dim);
    const std::uint64_t test_seed = derive_seed(rep_seed, 2);
    if (cfg.procedure == TestProcedure::marginal_baseline)
        return baseline_marginal_test(action, x, cfg.statistic, cfg.num_rounds, cfg.alpha,
                                      test_seed);
    return marginal_invariance_test(action, x, cfg.statistic, cfg.num_rounds, cfg.alpha, cfg.reuse,
                                    test_seed);
}

// One seeded replication of a synthetic design cell.
inline TestResult run_synthetic_replication(const ExperimentConfig& cfg, int n, double p, double s,
                                            std::uint64_t rep_seed) {
    Rng data_rng = make_rng(rep_seed, 0);
    if (cfg.design == "rot2d_invariance") {
        const Matrix x = gen_rot2d_invariance(n, p, data_rng);
        if (cfg.procedure == TestProcedure::marginal ||
            cfg.procedure == TestProcedure::marginal_baseline)
            return run_marginal(x, cfg, 2, rep_seed);
        throw std::invalid_argument("rot2d_invariance is a marginal design");
    }
    if (cfg.design == "gauss_cov") {
        auto [x, y] = gen_gauss_cov(n, cfg.d, p, data_rng);
        return run_conditional(RotationAction(cfg.d), std::move(x), std::move(y), cfg, rep_seed);
    }
    if (cfg.design == "gauss_pairwise_cov") {
        auto [x, y] = gen_gauss_pairwise_cov(n, cfg.d, p, data_rng);
        return run_conditional(RotationAction(cfg.d), std::move(x), std::move(y), cfg, rep_seed);
    }
    if (cfg.design == "chi_exact") {
        auto data = gen_chi_exact(n, cfg.d, p, data_rng);
        return run_conditional(RotationAction(cfg.d), std::move(data.x), std::move(data.y), cfg,
                               rep_seed, data.orbit_kernel);
    }
    if (cfg.design == "mean_shift") {
        auto [x, y] = gen_mean_shift(n, cfg.d, p, s, data_rng);
        return run_conditional(RotationAction(cfg.d), std::move(x), std::move(y), cfg, rep_seed);
    }
    if (cfg.design == "perm_shift") {
        auto [x, y] = gen_perm_shift(n, cfg.d, s, data_rng);
        return run_conditional(PermutationAction(cfg.d), std::move(x), std::move(y), cfg,
                               rep_seed);
    }
    if (cfg.design == "ring_equiv") {
        auto [x, y] = gen_ring_equivariant(n, p, -0.8, 0.25, data_rng);
        if (cfg.shuffle) {
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), data_rng);
            Matrix ys(n, y.cols());
            for (int i = 0; i < n; ++i) ys.row(i) = y.row(perm[i]);
            y = std::move(ys);
        }
        return run_conditional(RotationAction(2), std::move(x), std::move(y), cfg, rep_seed);
    }
    throw std::invalid_argument("unknown design: " + cfg.design);
}

// One seeded replication on loaded jet data: subsample, optionally shuffle,
// then run the configured test.
inline TestResult run_physics_replication(const ExperimentConfig& cfg,
                                          const LeadingPairDataset& full, int n,
                                          std::uint64_t rep_seed) {
    const PhysicsSource& ph = *cfg.physics;
    const int total = static_cast<int>(full.x.rows());
    require(n <= total, "subsample larger than the dataset");
    Rng data_rng = make_rng(rep_seed, 0);

    std::vector<int> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> pick(i, total - 1);
        std::swap(idx[i], idx[pick(data_rng)]);
    }
    Matrix x(n, full.x.cols()), y(n, full.y.cols());
    for (int i = 0; i < n; ++i) {
        x.row(i) = full.x.row(idx[i]);
        y.row(i) = full.y.row(idx[i]);
    }
    if (cfg.shuffle) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), data_rng);
        Matrix ys(n, y.cols());
        for (int i = 0; i < n; ++i) ys.row(i) = y.row(perm[i]);
        y = std::move(ys);
    }

    if (ph.group == "so2_equiv")
        return run_conditional(RotationAction(2), std::move(x), std::move(y), cfg, rep_seed);
    if (ph.group == "lorentz_equiv")
        return run_conditional(LorentzAction{}, std::move(x), std::move(y), cfg, rep_seed);

    // joint-invariance tests on the pooled pair (X, Y) in R^4
    Matrix z(n, x.cols() + y.cols());
    z << x, y;
    const std::uint64_t test_seed = derive_seed(rep_seed, 2);
    auto run_invariance = [&](const auto& action) {
        if (cfg.procedure == TestProcedure::marginal_baseline)
            return baseline_marginal_test(action, z, cfg.statistic, cfg.num_rounds, cfg.alpha,
                                          test_seed);
        return marginal_invariance_test(action, z, cfg.statistic, cfg.num_rounds, cfg.alpha,
                                        cfg.reuse, test_seed);
    };
    if (ph.group == "paired_rot") return run_invariance(PairedRotation2DAction{});
    if (ph.group == "unpaired_rot") return run_invariance(UnpairedRotation2DAction{});
    if (ph.group == "so4") return run_invariance(RotationAction(4));
    throw std::invalid_argument("unknown physics group: " + ph.group);
}

}  // namespace detail

inline TestResult run_single_replication(const ExperimentConfig& cfg, int n, double p, double s,
                                         std::uint64_t rep_seed,
                                         const LeadingPairDataset* physics_data = nullptr) {
    if (cfg.physics && cfg.design == "physics_csv") {
        require(physics_data != nullptr, "physics design needs loaded data");
        return detail::run_physics_replication(cfg, *physics_data, n, rep_seed);
    }
    return detail::run_synthetic_replication(cfg, n, p, s, rep_seed);
}

// Runs all grid cells; failed replications are recorded per cell and the run
// continues.
inline RejectionRateReport run_experiment(const ExperimentConfig& cfg,
                                          bool keep_p_values = false) {
    RejectionRateReport report;
    report.config = cfg;
    report.config_hash = config_hash(cfg);
    const int threads = detail::resolve_threads(cfg.threads);

    std::optional<LeadingPairDataset> physics_data;
    if (cfg.physics && cfg.design == "physics_csv") {
        const auto records = load_constituents(cfg.physics->path, cfg.physics->schema);
        physics_data = leading_pairs(records, cfg.physics->mode);
    }

    const std::vector<double>& p_grid = cfg.p_grid.empty() ? std::vector<double>{0.0} : cfg.p_grid;
    const std::vector<double>& s_grid = cfg.s_grid.empty() ? std::vector<double>{0.0} : cfg.s_grid;

    std::uint64_t cell_index = 0;
    for (int n : cfg.n_grid) {
        for (double p : p_grid) {
            for (double s : s_grid) {
                CellResult cell;
                cell.n = n;
                cell.p = p;
                cell.s = s;
                cell.replications = cfg.replications;
                std::vector<double> pvals(cfg.replications,
                                          std::numeric_limits<double>::quiet_NaN());
                std::vector<char> rejected(cfg.replications, 0);
                std::vector<std::string> errors(cfg.replications);

                const auto start = std::chrono::steady_clock::now();
                detail::parallel_for(cfg.replications, threads, [&](int rep) {
                    const std::uint64_t rep_seed = derive_seed(cfg.seed, cell_index, rep);
                    try {
                        const TestResult r = run_single_replication(
                            cfg, n, p, s, rep_seed,
                            physics_data ? &*physics_data : nullptr);
                        pvals[rep] = r.p_value;
                        rejected[rep] = r.reject ? 1 : 0;
                    } catch (const std::exception& e) {
                        errors[rep] = e.what();
                    }
                });
                const auto stop = std::chrono::steady_clock::now();
                cell.wall_ms =
                    std::chrono::duration<double, std::milli>(stop - start).count();

                double sum_p = 0.0;
                int ok = 0;
                for (int rep = 0; rep < cfg.replications; ++rep) {
                    if (!errors[rep].empty()) {
                        ++cell.failures;
                        if (cell.first_error.empty()) cell.first_error = errors[rep];
                        continue;
                    }
                    ++ok;
                    sum_p += pvals[rep];
                    cell.rejections += rejected[rep];
                    if (keep_p_values) cell.p_values.push_back(pvals[rep]);
                }
                cell.rate = static_cast<double>(cell.rejections) / cfg.replications;
                cell.interval = wilson_interval(cell.rejections, cfg.replications);
                cell.mean_p_value = ok > 0 ? sum_p / ok : std::numeric_limits<double>::quiet_NaN();
                report.cells.push_back(std::move(cell));
                ++cell_index;
            }
        }
    }
    return report;
}

}  // namespace symtest

#endif
