// Benchmark and verification driver for the streaming split-selection
// library. Subcommands:
//   gen     write a synthetic sparse dataset
//   run     stream one dataset through one algorithm, emit per-point CSV
//   sweep   grid of (axis value, algorithm, repeat) cells, one CSV row each
//   verify  structural invariants + approximation guarantee on random streams
// Exit codes: 0 success, 1 usage or I/O error (bad flags, unreadable or
// malformed input, unwritable output), 2 violation (approximation guarantee
// or structural invariant broken, or internal state corruption).

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sparsesplit/sparsesplit.hpp"

namespace ss = sparsesplit;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- engines

enum class Algo { upd_ent, upd_gini, base_ent, base_gini };

Algo parse_algo(const std::string& s) {
    if (s == "upd-ent") return Algo::upd_ent;
    if (s == "upd-gini") return Algo::upd_gini;
    if (s == "base-ent") return Algo::base_ent;
    if (s == "base-gini") return Algo::base_gini;
    throw UsageError("unknown algorithm '" + s + "'");
}

const char* algo_name(Algo a) {
    switch (a) {
        case Algo::upd_ent: return "upd-ent";
        case Algo::upd_gini: return "upd-gini";
        case Algo::base_ent: return "base-ent";
        default: return "base-gini";
    }
}

ss::Measure measure_of(Algo a) {
    return a == Algo::upd_ent || a == Algo::base_ent ? ss::Measure::entropy
                                                     : ss::Measure::gini;
}

struct Engine {
    virtual ~Engine() = default;
    virtual ss::SplitDecision process(const ss::SparsePoint&) = 0;
    virtual std::size_t nonempty_trees() const = 0;
    virtual const ss::CounterStore& store() const = 0;
};

struct UpdEntEngine final : Engine {
    ss::UpdEnt e;
    explicit UpdEntEngine(double alpha) : e(alpha) {}
    ss::SplitDecision process(const ss::SparsePoint& p) override {
        return e.process(p);
    }
    std::size_t nonempty_trees() const override {
        return e.stats().nonempty_trees;
    }
    const ss::CounterStore& store() const override { return e.store(); }
};

struct UpdGiniEngine final : Engine {
    ss::UpdGini e;
    explicit UpdGiniEngine(double alpha) : e(alpha) {}
    ss::SplitDecision process(const ss::SparsePoint& p) override {
        return e.process(p);
    }
    std::size_t nonempty_trees() const override {
        return e.stats().nonempty_trees;
    }
    const ss::CounterStore& store() const override { return e.store(); }
};

struct BaselineEngine final : Engine {
    ss::Baseline e;
    explicit BaselineEngine(ss::Measure m) : e(m) {}
    ss::SplitDecision process(const ss::SparsePoint& p) override {
        return e.process(p);
    }
    std::size_t nonempty_trees() const override { return 0; }
    const ss::CounterStore& store() const override { return e.store(); }
};

std::unique_ptr<Engine> make_engine(Algo a, double alpha) {
    switch (a) {
        case Algo::upd_ent: return std::make_unique<UpdEntEngine>(alpha);
        case Algo::upd_gini: return std::make_unique<UpdGiniEngine>(alpha);
        default: return std::make_unique<BaselineEngine>(measure_of(a));
    }
}

// -------------------------------------------------------------------- CSV

constexpr const char* kCsvHeader =
    "point_index,algo,alpha,point_ns,cum_ns,nonempty_T,best_feature,"
    "best_score,oracle_feature,oracle_score,ratio";

void write_row(std::ostream& os, std::uint64_t idx, Algo algo, double alpha,
               std::uint64_t point_ns, std::uint64_t cum_ns, std::size_t trees,
               const ss::SplitDecision& d,
               const std::optional<ss::SplitDecision>& oracle, double ratio) {
    os << idx << ',' << algo_name(algo) << ',' << fmt(alpha) << ',' << point_ns
       << ',' << cum_ns << ',' << trees << ',';
    if (d.feature) os << *d.feature;
    os << ',' << fmt(d.score) << ',';
    if (oracle && oracle->feature) os << *oracle->feature;
    os << ',';
    if (oracle) os << fmt(oracle->score);
    os << ',';
    if (oracle) os << fmt(ratio);
    os << '\n';
}

// -------------------------------------------------------------- data input

std::vector<ss::SparsePoint> load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    return ss::read_dataset(in);
}

struct OutFile {
    std::ofstream file;
    std::ostream* os = nullptr;

    explicit OutFile(const std::string& path) {
        if (path == "-") {
            os = &std::cout;
            return;
        }
        file.open(path, std::ios::binary); // '\n' endings on every platform
        if (!file)
            throw std::runtime_error("cannot open output file '" + path + "'");
        os = &file;
    }
    std::ostream& get() { return *os; }
};

// -------------------------------------------------------------------- gen

int cmd_gen(const ss::GenConfig& cfg, const std::string& output) {
    const ss::Generated data = ss::generate(cfg);
    OutFile out(output);
    ss::write_dataset(out.get(), data.points, ss::DatasetHeader{ss::describe(cfg)});
    out.get().flush();
    if (!out.get()) throw std::runtime_error("write failed");
    return 0;
}

// -------------------------------------------------------------------- run

struct RunOpts {
    std::string input;
    bool synthetic = false;
    ss::GenConfig gen;
    std::string algo = "upd-ent";
    double alpha = 0.1;
    bool oracle = false;
    std::uint64_t report_every = 1;
    bool no_timing = false;
    std::string output = "-";
};

int cmd_run(const RunOpts& opt) {
    if (opt.synthetic == !opt.input.empty())
        throw UsageError("run: pass exactly one of --input or --synthetic");
    const Algo algo = parse_algo(opt.algo);
    const ss::Measure measure = measure_of(algo);
    const std::vector<ss::SparsePoint> points =
        opt.synthetic ? ss::generate(opt.gen).points : load_points(opt.input);

    std::unique_ptr<Engine> engine = make_engine(algo, opt.alpha);
    OutFile out(opt.output);
    out.get() << kCsvHeader << '\n';

    using Clock = std::chrono::steady_clock;
    std::uint64_t cum_ns = 0;
    const std::uint64_t total = points.size();
    for (std::uint64_t idx = 1; idx <= total; ++idx) {
        const ss::SparsePoint& p = points[idx - 1];
        std::uint64_t point_ns = 0;
        ss::SplitDecision d;
        if (opt.no_timing) {
            d = engine->process(p);
        } else {
            const auto t0 = Clock::now();
            d = engine->process(p);
            point_ns = std::uint64_t(
                std::chrono::duration_cast<std::chrono::nanoseconds>(
                    Clock::now() - t0)
                    .count());
        }
        cum_ns += point_ns;

        std::optional<ss::SplitDecision> oracle;
        double ratio = 1.0;
        bool violation = false;
        if (opt.oracle) {
            oracle = ss::exact_best(engine->store(), measure);
            if (oracle->score > 0.0) ratio = d.score / oracle->score;
            else ratio = d.score > 0.0
                             ? std::numeric_limits<double>::infinity()
                             : 1.0;
            violation = d.score > (1.0 + opt.alpha) * oracle->score;
        }
        if (idx % opt.report_every == 0 || idx == total || violation)
            write_row(out.get(), idx, algo, opt.alpha, point_ns, cum_ns,
                      engine->nonempty_trees(), d, oracle, ratio);
        if (violation) {
            out.get().flush();
            std::cerr << "guarantee violation at point " << idx << ": score "
                      << fmt(d.score) << " > (1+alpha) * " << fmt(oracle->score)
                      << '\n';
            return 2;
        }
    }
    out.get().flush();
    if (!out.get()) throw std::runtime_error("write failed");
    return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepOpts {
    std::string axis = "alpha";
    std::vector<double> values;
    std::vector<std::string> algos = {"upd-ent", "upd-gini"};
    std::uint64_t repeats = 3;
    ss::GenConfig base;
    double alpha = 0.1;
    unsigned jobs = 1;
    bool no_timing = false;
    std::string output = "-";
};

// Axis application: alpha swaps the engine parameter, n the stream length,
// dim the noise dimension (with q rescaled so expected ones per point stay
// fixed).
void apply_axis(const SweepOpts& opt, double value, ss::GenConfig& cfg,
                double& alpha) {
    if (opt.axis == "alpha") {
        alpha = value;
    } else if (opt.axis == "n") {
        cfg.n = std::uint64_t(value);
    } else {
        cfg.d2 = std::uint64_t(value);
        cfg.q = opt.base.q * double(opt.base.d2) / double(cfg.d2);
    }
}

struct SweepCell {
    double value = 0.0;
    Algo algo = Algo::upd_ent;
    std::uint64_t repeat = 0;
    std::uint64_t total_ns = 0;
    std::size_t trees = 0;
    ss::SplitDecision last;
};

void run_sweep_cell(const SweepOpts& opt, SweepCell& cell) {
    ss::GenConfig cfg = opt.base;
    double alpha = opt.alpha;
    apply_axis(opt, cell.value, cfg, alpha);
    cfg.seed = opt.base.seed + cell.repeat;

    const ss::Generated data = ss::generate(cfg);
    std::unique_ptr<Engine> engine = make_engine(cell.algo, alpha);

    using Clock = std::chrono::steady_clock;
    if (opt.no_timing) {
        for (const ss::SparsePoint& p : data.points)
            cell.last = engine->process(p);
    } else {
        const auto t0 = Clock::now();
        for (const ss::SparsePoint& p : data.points)
            cell.last = engine->process(p);
        cell.total_ns = std::uint64_t(
            std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                                 t0)
                .count());
    }
    cell.trees = engine->nonempty_trees();
}

int cmd_sweep(const SweepOpts& opt) {
    if (opt.axis != "alpha" && opt.axis != "n" && opt.axis != "dim")
        throw UsageError("sweep: --axis must be alpha, n, or dim");
    if (opt.values.empty()) throw UsageError("sweep: --values is empty");
    if (opt.repeats < 1) throw UsageError("sweep: --repeats must be >= 1");
    for (double v : opt.values) {
        if (opt.axis == "alpha") {
            if (!(v > 0.0)) throw UsageError("sweep: alpha values must be > 0");
        } else {
            if (!(v >= 1.0) || v != std::floor(v))
                throw UsageError("sweep: " + opt.axis +
                                 " values must be positive integers");
            if (opt.axis == "dim" &&
                opt.base.q * double(opt.base.d2) / v > 1.0)
                throw UsageError("sweep: rescaled q exceeds 1 at dim " +
                                 std::to_string(std::uint64_t(v)));
        }
    }

    std::vector<SweepCell> cells;
    for (double v : opt.values)
        for (const std::string& a : opt.algos)
            for (std::uint64_t r = 0; r < opt.repeats; ++r) {
                SweepCell c;
                c.value = v;
                c.algo = parse_algo(a);
                c.repeat = r;
                cells.push_back(c);
            }

    const unsigned jobs =
        std::max(1u, std::min<unsigned>(opt.jobs, cells.size()));
    if (jobs == 1) {
        for (SweepCell& c : cells) run_sweep_cell(opt, c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (unsigned t = 0; t < jobs; ++t)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cells.size();
                     i = next.fetch_add(1))
                    run_sweep_cell(opt, cells[i]);
            });
        for (std::thread& w : workers) w.join();
    }

    // One aggregated row per (axis value, algorithm): arithmetic means over
    // the repeats. Aggregation order is fixed, so the output is byte-stable
    // regardless of --jobs.
    OutFile out(opt.output);
    out.get() << kCsvHeader << '\n';
    const std::uint64_t reps = opt.repeats;
    for (std::size_t g = 0; g + reps <= cells.size(); g += reps) {
        ss::GenConfig cfg = opt.base;
        double alpha = opt.alpha;
        apply_axis(opt, cells[g].value, cfg, alpha);

        double mean_ns = 0.0, mean_trees = 0.0, mean_score = 0.0;
        std::optional<ss::FeatureId> feature = cells[g].last.feature;
        for (std::size_t k = 0; k < reps; ++k) {
            const SweepCell& c = cells[g + k];
            mean_ns += double(c.total_ns);
            mean_trees += double(c.trees);
            mean_score += c.last.score;
            if (c.last.feature != feature) feature.reset();
        }
        mean_ns /= double(reps);
        mean_trees /= double(reps);
        mean_score /= double(reps);

        out.get() << "# cell axis=" << opt.axis << " value="
                  << fmt(cells[g].value) << " algo=" << algo_name(cells[g].algo)
                  << " alpha=" << fmt(alpha) << " n=" << cfg.n
                  << " d1=" << cfg.d1 << " d2=" << cfg.d2 << " q=" << fmt(cfg.q)
                  << " seeds=" << opt.base.seed << ".."
                  << opt.base.seed + reps - 1 << '\n';
        // aggregated row: point_ns = mean per-update, cum_ns = mean total,
        // nonempty_T and best_score = means; best_feature only if the repeats
        // agree; oracle columns stay empty.
        out.get() << cfg.n << ',' << algo_name(cells[g].algo) << ','
                  << fmt(alpha) << ','
                  << std::uint64_t(std::llround(mean_ns / double(cfg.n))) << ','
                  << std::uint64_t(std::llround(mean_ns)) << ','
                  << fmt(mean_trees) << ',';
        if (feature) out.get() << *feature;
        out.get() << ',' << fmt(mean_score) << ",,,\n";
    }
    out.get().flush();
    if (!out.get()) throw std::runtime_error("write failed");
    return 0;
}

// ----------------------------------------------------------------- verify

struct VerifyOpts {
    std::uint64_t seeds = 3;
    ss::GenConfig base{1000, 8, 200, 0.02, 0};
    std::vector<double> alphas = {0.1, 1.0};
};

int cmd_verify(const VerifyOpts& opt) {
    for (double alpha : opt.alphas)
        if (!(alpha > 0.0)) throw UsageError("verify: alpha must be > 0");
    for (double alpha : opt.alphas) {
        for (std::uint64_t seed = 0; seed < opt.seeds; ++seed) {
            ss::GenConfig cfg = opt.base;
            cfg.seed = opt.base.seed + seed;
            const ss::Generated data = ss::generate(cfg);
            ss::UpdEnt ent(alpha);
            ss::UpdGini gin(alpha);
            double max_ratio_ent = 1.0, max_ratio_gin = 1.0;
            std::uint64_t idx = 0;
            for (const ss::SparsePoint& p : data.points) {
                ++idx;
                const ss::SplitDecision de = ent.process(p);
                const ss::SplitDecision dg = gin.process(p);
                for (const auto* eng_name : {"upd-ent", "upd-gini"}) {
                    const auto violations = eng_name == std::string("upd-ent")
                                                ? ent.check_invariants()
                                                : gin.check_invariants();
                    if (!violations.empty()) {
                        std::cerr << "invariant violation (" << eng_name
                                  << ", alpha=" << fmt(alpha)
                                  << ", seed=" << cfg.seed << ", point " << idx
                                  << "): " << violations.front() << '\n';
                        return 2;
                    }
                }
                const ss::SplitDecision oe =
                    ss::exact_best(ent.store(), ss::Measure::entropy);
                const ss::SplitDecision og =
                    ss::exact_best(gin.store(), ss::Measure::gini);
                if (oe.feature && oe.score > 0.0)
                    max_ratio_ent = std::max(max_ratio_ent, de.score / oe.score);
                if (og.feature && og.score > 0.0)
                    max_ratio_gin = std::max(max_ratio_gin, dg.score / og.score);
                const bool bad_ent =
                    oe.feature && de.score > (1.0 + alpha) * oe.score;
                const bool bad_gin =
                    og.feature && dg.score > (1.0 + alpha) * og.score;
                if (bad_ent || bad_gin) {
                    std::cerr << "guarantee violation ("
                              << (bad_ent ? "upd-ent" : "upd-gini")
                              << ", alpha=" << fmt(alpha) << ", seed=" << cfg.seed
                              << ", point " << idx << ")\n";
                    return 2;
                }
            }
            std::cout << "alpha=" << fmt(alpha) << " seed=" << cfg.seed << ": "
                      << cfg.n << " updates ok (max ratio ent="
                      << fmt(max_ratio_ent) << ", gini=" << fmt(max_ratio_gin)
                      << ")\n";
        }
    }
    std::cout << "verify: OK\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming approximate best-split benchmark"};
    app.require_subcommand(1);

    ss::GenConfig gen_cfg;
    std::string gen_output = "-";
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--n", gen_cfg.n, "number of points")->capture_default_str();
    gen->add_option("--d1", gen_cfg.d1, "label-coupled features")
        ->capture_default_str();
    gen->add_option("--d2", gen_cfg.d2, "noise features")->capture_default_str();
    gen->add_option("--q", gen_cfg.q, "noise fire rate")->capture_default_str();
    gen->add_option("--seed", gen_cfg.seed, "generator seed")
        ->capture_default_str();
    gen->add_option("--output,-o", gen_output, "output path, - for stdout")
        ->capture_default_str();

    RunOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "stream a dataset through one algorithm");
    run->add_option("--input,-i", run_opts.input, "dataset file");
    run->add_flag("--synthetic", run_opts.synthetic,
                  "generate the stream instead of reading a file");
    run->add_option("--n", run_opts.gen.n, "synthetic: points")
        ->capture_default_str();
    run->add_option("--d1", run_opts.gen.d1, "synthetic: label-coupled features")
        ->capture_default_str();
    run->add_option("--d2", run_opts.gen.d2, "synthetic: noise features")
        ->capture_default_str();
    run->add_option("--q", run_opts.gen.q, "synthetic: noise fire rate")
        ->capture_default_str();
    run->add_option("--seed", run_opts.gen.seed, "synthetic: seed")
        ->capture_default_str();
    run->add_option("--algo", run_opts.algo, "upd-ent|upd-gini|base-ent|base-gini")
        ->check(CLI::IsMember({"upd-ent", "upd-gini", "base-ent", "base-gini"}))
        ->capture_default_str();
    run->add_option("--alpha", run_opts.alpha, "approximation parameter")
        ->capture_default_str();
    run->add_flag("--oracle", run_opts.oracle,
                  "compare every update against the exact optimum");
    run->add_option("--report-every", run_opts.report_every,
                    "emit a CSV row every k points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_flag("--no-timing", run_opts.no_timing,
                  "zero the *_ns columns for byte-stable output");
    run->add_option("--output,-o", run_opts.output, "CSV path, - for stdout")
        ->capture_default_str();

    SweepOpts sweep_opts;
    CLI::App* sweep = app.add_subcommand("sweep", "grid of benchmark cells");
    sweep->add_option("--axis", sweep_opts.axis, "alpha|n|dim")
        ->check(CLI::IsMember({"alpha", "n", "dim"}))
        ->capture_default_str();
    sweep->add_option("--values", sweep_opts.values, "axis values")->required();
    sweep->add_option("--algos", sweep_opts.algos, "algorithms to run")
        ->capture_default_str();
    sweep->add_option("--repeats", sweep_opts.repeats, "seeds per cell")
        ->capture_default_str();
    sweep->add_option("--n", sweep_opts.base.n, "base: points")
        ->capture_default_str();
    sweep->add_option("--d1", sweep_opts.base.d1, "base: label-coupled features")
        ->capture_default_str();
    sweep->add_option("--d2", sweep_opts.base.d2, "base: noise features")
        ->capture_default_str();
    sweep->add_option("--q", sweep_opts.base.q, "base: noise fire rate")
        ->capture_default_str();
    sweep->add_option("--seed", sweep_opts.base.seed, "base seed")
        ->capture_default_str();
    sweep->add_option("--alpha", sweep_opts.alpha,
                      "approximation parameter for non-alpha axes")
        ->capture_default_str();
    sweep->add_option("--jobs", sweep_opts.jobs, "parallel cells")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_flag("--no-timing", sweep_opts.no_timing,
                    "zero the *_ns columns for byte-stable output");
    sweep->add_option("--output,-o", sweep_opts.output, "CSV path, - for stdout")
        ->capture_default_str();

    VerifyOpts verify_opts;
    CLI::App* verify = app.add_subcommand(
        "verify", "invariants and guarantee on random streams");
    verify->add_option("--seeds", verify_opts.seeds, "streams per alpha")
        ->capture_default_str();
    verify->add_option("--n", verify_opts.base.n, "points per stream")
        ->capture_default_str();
    verify->add_option("--d1", verify_opts.base.d1, "label-coupled features")
        ->capture_default_str();
    verify->add_option("--d2", verify_opts.base.d2, "noise features")
        ->capture_default_str();
    verify->add_option("--q", verify_opts.base.q, "noise fire rate")
        ->capture_default_str();
    verify->add_option("--seed", verify_opts.base.seed, "base seed")
        ->capture_default_str();
    verify->add_option("--alpha", verify_opts.alphas, "alphas to verify")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (*gen) return cmd_gen(gen_cfg, gen_output);
        if (*run) return cmd_run(run_opts);
        if (*sweep) return cmd_sweep(sweep_opts);
        return cmd_verify(verify_opts);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) { // bad parameter values
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) { // bad parameter values
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) { // I/O and malformed input
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) { // internal state corruption
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
