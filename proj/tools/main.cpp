// gesentinel: guessing-entropy training monitor and benchmark CLI.
//
// Subcommands:
//   bench       time the optimized GE kernel against the naive reference
//   simulate    write synthetic per-epoch attack sets to disk
//   monitor     run the persistence/patience early-stopping monitor
//   gridsearch  evaluate a hyper-parameter grid, stopping at the first winner
//
// Exit codes: 0 success (monitor: stopped), 1 internal failure,
// 2 usage or input error, 3 completed without a stop.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ges/attack_io.hpp"
#include "ges/early_stop.hpp"
#include "ges/ge.hpp"
#include "ges/grid_search.hpp"
#include "ges/rng.hpp"
#include "ges/sim.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNoStop = 3;

struct ScheduleOptions {
    std::string preset = "overfit";
    std::string schedule_file;
    int epochs = -1;
    double theta_max = -1.0;
    double theta = -1.0;
    double noise = -1.0;
    int peak = -1;
    int plateau = -1;
};

void add_schedule_options(CLI::App* cmd, ScheduleOptions& opts) {
    cmd->add_option("--preset", opts.preset, "Schedule preset: overfit, ramp, or flat")
        ->check(CLI::IsMember({"overfit", "ramp", "flat"}));
    cmd->add_option("--schedule", opts.schedule_file, "Schedule JSON file (overrides --preset)");
    cmd->add_option("--epochs", opts.epochs, "Number of epochs");
    cmd->add_option("--theta-max", opts.theta_max, "Peak signal strength (overfit/ramp)");
    cmd->add_option("--theta", opts.theta, "Constant signal strength (flat)");
    cmd->add_option("--noise", opts.noise, "Per-score Gaussian noise sigma");
    cmd->add_option("--peak", opts.peak, "Epoch index where the overfit ramp peaks");
    cmd->add_option("--plateau", opts.plateau, "Epochs the overfit signal holds at the peak");
}

ges::LeakageSchedule build_schedule(const ScheduleOptions& opts, std::uint64_t sim_seed) {
    if (!opts.schedule_file.empty()) return ges::load_schedule(opts.schedule_file);

    if (opts.preset == "overfit") {
        const int epochs = opts.epochs >= 0 ? opts.epochs : 50;
        const int peak = opts.peak >= 0 ? opts.peak : 10;
        const int plateau = opts.plateau >= 0 ? opts.plateau : 10;
        const double theta_max = opts.theta_max >= 0 ? opts.theta_max : 0.33;
        const double noise = opts.noise >= 0 ? opts.noise : 1.0;
        return ges::overfit_schedule(epochs, peak, theta_max, plateau, noise, sim_seed);
    }
    if (opts.preset == "ramp") {
        const int epochs = opts.epochs >= 0 ? opts.epochs : 40;
        const double theta_max = opts.theta_max >= 0 ? opts.theta_max : 0.43;
        const double noise = opts.noise >= 0 ? opts.noise : 1.0;
        return ges::ramp_schedule(epochs, theta_max, noise, sim_seed);
    }
    const int epochs = opts.epochs >= 0 ? opts.epochs : 20;
    const double theta = opts.theta >= 0 ? opts.theta : 0.0;
    const double noise = opts.noise >= 0 ? opts.noise : 1.0;
    return ges::flat_schedule(epochs, theta, noise, sim_seed);
}

struct MonitorOptions {
    double w = 0.0;
    int v = -1;
    int na = -1; // defaults to max_traces
    std::string stop_case = "soft";
    std::string mode = "full";
    double fraction = 0.95;
    int patience = 3;
};

void add_monitor_options(CLI::App* cmd, MonitorOptions& opts) {
    cmd->add_option("--w", opts.w, "Highest acceptable GE value (area-of-hit ceiling)");
    cmd->add_option("--v", opts.v, "Fixed lower trace bound (greedy case)");
    cmd->add_option("--na", opts.na, "Upper trace bound of the area of hit (default: max traces)");
    cmd->add_option("--case", opts.stop_case, "Stop case: soft or greedy")
        ->check(CLI::IsMember({"soft", "greedy"}));
    cmd->add_option("--mode", opts.mode, "Persistence mode: full or binary")
        ->check(CLI::IsMember({"full", "binary"}));
    cmd->add_option("--fraction", opts.fraction, "In-area checkpoint share required in binary mode");
    cmd->add_option("--patience", opts.patience, "Consecutive hit epochs required to stop");
}

ges::AreaOfHit make_area(const MonitorOptions& opts, int max_traces) {
    ges::AreaOfHit area;
    area.max_ge = opts.w;
    area.max_traces = opts.na >= 0 ? opts.na : max_traces;
    if (opts.v >= 0) area.min_traces = opts.v;
    if (opts.stop_case == "greedy" && !area.min_traces)
        throw std::invalid_argument("greedy case needs --v");
    return area;
}

ges::PersistenceConfig make_persistence(const MonitorOptions& opts) {
    ges::PersistenceConfig cfg;
    cfg.mode = opts.mode == "binary" ? ges::PersistenceMode::Binary : ges::PersistenceMode::Full;
    cfg.binary_fraction = cfg.mode == ges::PersistenceMode::Binary ? opts.fraction : 1.0;
    cfg.stop_case = opts.stop_case == "greedy" ? ges::StopCase::Greedy : ges::StopCase::Soft;
    return cfg;
}

struct BenchArgs {
    std::string attack_set;
    bool synthetic = false;
    int traces = 5000;
    int keyspace = 256;
    int true_key = 0;
    double theta = 0.5;
    double noise = 1.0;
    int step = 100;
    int attacks = 10;
    int max_traces = -1;
    int trials = 10;
    std::uint64_t seed = 0;
    std::string out = "bench.csv";
};

int cmd_bench(const BenchArgs& args) {
    ges::AttackSet attack;
    if (!args.attack_set.empty()) {
        attack = ges::load_attack_set(args.attack_set);
    } else if (args.synthetic) {
        auto schedule = ges::flat_schedule(1, args.theta, args.noise, ges::derive_seed(args.seed, "sim"));
        attack = ges::generate_epoch(schedule, 0, args.traces, args.keyspace,
                                     static_cast<std::uint8_t>(args.true_key))
                     .attack;
    } else {
        throw std::invalid_argument("bench needs --attack-set or --synthetic");
    }

    ges::GEConfig cfg;
    cfg.n_attacks = args.attacks;
    cfg.max_traces = args.max_traces >= 0 ? args.max_traces : static_cast<int>(attack.n_traces());
    cfg.step = args.step;
    cfg.seed = ges::derive_seed(args.seed, "ge");

    const ges::BenchReport report = ges::bench_ge(attack, cfg, args.trials);
    std::ofstream out(args.out);
    if (!out)
        throw std::runtime_error("bench: cannot write " + args.out);
    ges::write_bench_csv(out, report);
    std::cout << "wrote " << report.rows.size() << " rows to " << args.out << "\n";
    return kExitOk;
}

struct SimulateArgs {
    ScheduleOptions schedule;
    int traces = 1000;
    int keyspace = 256;
    int true_key = 0;
    std::uint64_t seed = 0;
    std::string out = "epochs";
};

int cmd_simulate(const SimulateArgs& args) {
    const auto schedule = build_schedule(args.schedule, ges::derive_seed(args.seed, "sim"));
    for (int epoch = 0; epoch < schedule.n_epochs; ++epoch) {
        const auto batch = ges::generate_epoch(schedule, epoch, args.traces, args.keyspace,
                                               static_cast<std::uint8_t>(args.true_key));
        const fs::path dir = fs::path(args.out) / ("epoch_" + std::to_string(epoch + 1));
        ges::save_attack_set(dir.string(), batch.attack);
    }
    std::cout << "wrote " << schedule.n_epochs << " epochs to " << args.out << "\n";
    return kExitOk;
}

struct MonitorArgs {
    ScheduleOptions schedule;
    MonitorOptions monitor;
    int traces = 1200;
    int keyspace = 256;
    int true_key = 0;
    int attacks = 30;
    int step = 100;
    int max_traces = 300;
    std::uint64_t seed = 0;
    std::string out = "run";
};

int cmd_monitor(const MonitorArgs& args) {
    const auto schedule = build_schedule(args.schedule, ges::derive_seed(args.seed, "sim"));

    ges::GEConfig ge_cfg;
    ge_cfg.n_attacks = args.attacks;
    ge_cfg.max_traces = args.max_traces >= 0 ? args.max_traces : args.traces;
    ge_cfg.step = args.step;
    ge_cfg.seed = ges::derive_seed(args.seed, "ge");

    const ges::AreaOfHit area = make_area(args.monitor, ge_cfg.max_traces);
    const ges::PersistenceConfig cfg = make_persistence(args.monitor);

    const auto source = ges::make_epoch_source(schedule, args.traces, args.keyspace,
                                               static_cast<std::uint8_t>(args.true_key));
    const ges::MonitorReport report =
        ges::monitor_training(source, ge_cfg, area, cfg, args.monitor.patience);
    ges::write_monitor_run(args.out, report);

    if (report.stopped_at) {
        std::cout << "stopped at epoch " << *report.stopped_at << "\n";
        return kExitOk;
    }
    std::cout << "no stop\n";
    return kExitNoStop;
}

struct GridArgs {
    std::string space_file;
    ScheduleOptions schedule;
    MonitorOptions monitor;
    int traces = 1200;
    int keyspace = 256;
    int true_key = 0;
    std::vector<int> attacks = {30};
    int step = 100;
    int max_traces = 300;
    int repeat = 1;
    std::uint64_t seed = 0;
    std::string out = "search";
};

const std::vector<std::string> kScheduleAxes = {"preset",     "n_epochs", "theta_max", "theta",
                                                "noise_sigma", "peak_epoch", "plateau"};

ges::Trainer make_trainer(const GridArgs& args, std::uint64_t run_seed) {
    return [args, run_seed](const ges::GridPoint& point) -> ges::EpochSource {
        ScheduleOptions opts = args.schedule;
        for (const auto& [name, value] : point.params) {
            if (name == "preset")
                opts.preset = value.get<std::string>();
            else if (name == "n_epochs")
                opts.epochs = value.get<int>();
            else if (name == "theta_max")
                opts.theta_max = value.get<double>();
            else if (name == "theta")
                opts.theta = value.get<double>();
            else if (name == "noise_sigma")
                opts.noise = value.get<double>();
            else if (name == "peak_epoch")
                opts.peak = value.get<int>();
            else if (name == "plateau")
                opts.plateau = value.get<int>();
        }
        const auto schedule = build_schedule(opts, ges::derive_seed(run_seed, "grid.sim", point.index));
        return ges::make_epoch_source(schedule, args.traces, args.keyspace,
                                      static_cast<std::uint8_t>(args.true_key));
    };
}

int cmd_gridsearch(const GridArgs& args) {
    const ges::HyperSpace space = ges::HyperSpace::load(args.space_file);
    for (const auto& axis : space.axes) {
        bool known = false;
        for (const auto& name : kScheduleAxes) known = known || name == axis.name;
        if (!known)
            throw std::invalid_argument("gridsearch: unknown axis '" + axis.name + "' (supported: " +
                                        "preset, n_epochs, theta_max, theta, noise_sigma, peak_epoch, plateau)");
    }
    if (args.repeat < 1)
        throw std::invalid_argument("gridsearch: --repeat must be >= 1");
    if (args.attacks.size() != 1 && args.attacks.size() != static_cast<std::size_t>(args.repeat))
        throw std::invalid_argument("gridsearch: --attacks takes one value or one per repeat");

    bool any_winner = false;
    for (int rep = 0; rep < args.repeat; ++rep) {
        const std::uint64_t run_seed =
            args.repeat == 1 ? args.seed : ges::derive_seed(args.seed, "repeat", rep);

        ges::GEConfig ge_cfg;
        ge_cfg.n_attacks = args.attacks[args.attacks.size() == 1 ? 0 : rep];
        ge_cfg.max_traces = args.max_traces >= 0 ? args.max_traces : args.traces;
        ge_cfg.step = args.step;
        ge_cfg.seed = ges::derive_seed(run_seed, "ge");

        const ges::AreaOfHit area = make_area(args.monitor, ge_cfg.max_traces);
        const ges::PersistenceConfig cfg = make_persistence(args.monitor);
        area.validate();
        cfg.validate();
        if (area.max_traces > ge_cfg.max_traces)
            throw std::invalid_argument("gridsearch: --na exceeds --max-traces");

        const auto outcome = ges::search(space, make_trainer(args, run_seed), ge_cfg, area, cfg,
                                         args.monitor.patience);
        const fs::path run_dir =
            args.repeat == 1 ? fs::path(args.out) : fs::path(args.out) / ("rep_" + std::to_string(rep + 1));
        ges::write_search_run(run_dir.string(), outcome);

        if (outcome.winner) {
            any_winner = true;
            std::cout << "winner: point " << (outcome.winner->index + 1) << " (" <<
                outcome.winner->to_string() << "), stopped at epoch "
                      << *outcome.evaluated.back().report->stopped_at << ", evaluated "
                      << outcome.evaluated.size() << " of " << space.size() << "\n";
        } else {
            std::cout << "exhausted: no point met the stop conditions ("
                      << outcome.evaluated.size() << " evaluated)\n";
        }
    }
    return any_winner ? kExitOk : kExitNoStop;
}

int resolve_threads(int flag_value) {
    if (const char* env = std::getenv("GE_SENTINEL_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("GE_SENTINEL_THREADS is not an integer: " + std::string(env));
        }
    }
    return flag_value;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guessing-entropy early-stopping toolkit"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "Worker threads for GE repetitions (default: all cores)");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time the optimized GE kernel against the naive reference");
    bench_cmd->add_option("--attack-set", bench.attack_set, "Attack-set directory or attack.json path");
    bench_cmd->add_flag("--synthetic", bench.synthetic, "Generate a synthetic attack set instead");
    bench_cmd->add_option("--traces", bench.traces, "Synthetic trace count");
    bench_cmd->add_option("--keyspace", bench.keyspace, "Synthetic keyspace size");
    bench_cmd->add_option("--true-key", bench.true_key, "Synthetic true key byte");
    bench_cmd->add_option("--theta", bench.theta, "Synthetic signal strength");
    bench_cmd->add_option("--noise", bench.noise, "Synthetic noise sigma");
    bench_cmd->add_option("--step", bench.step, "Checkpoint spacing");
    bench_cmd->add_option("--attacks", bench.attacks, "Attack repetitions per curve");
    bench_cmd->add_option("--max-traces", bench.max_traces, "Traces per repetition (default: all)");
    bench_cmd->add_option("--trials", bench.trials, "Timing trials (median reported)");
    bench_cmd->add_option("--seed", bench.seed, "Root RNG seed");
    bench_cmd->add_option("--out", bench.out, "Output CSV path");

    SimulateArgs simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "Write synthetic per-epoch attack sets");
    add_schedule_options(sim_cmd, simulate.schedule);
    sim_cmd->add_option("--traces", simulate.traces, "Traces per epoch");
    sim_cmd->add_option("--keyspace", simulate.keyspace, "Keyspace size");
    sim_cmd->add_option("--true-key", simulate.true_key, "True key byte");
    sim_cmd->add_option("--seed", simulate.seed, "Root RNG seed");
    sim_cmd->add_option("--out", simulate.out, "Output directory");

    MonitorArgs monitor;
    auto* mon_cmd = app.add_subcommand("monitor", "Run the early-stopping monitor on a simulated training");
    add_schedule_options(mon_cmd, monitor.schedule);
    add_monitor_options(mon_cmd, monitor.monitor);
    mon_cmd->add_option("--traces", monitor.traces, "Traces per epoch");
    mon_cmd->add_option("--keyspace", monitor.keyspace, "Keyspace size");
    mon_cmd->add_option("--true-key", monitor.true_key, "True key byte");
    mon_cmd->add_option("--attacks", monitor.attacks, "Attack repetitions per curve");
    mon_cmd->add_option("--step", monitor.step, "Checkpoint spacing");
    mon_cmd->add_option("--max-traces", monitor.max_traces, "Traces per repetition");
    mon_cmd->add_option("--seed", monitor.seed, "Root RNG seed");
    mon_cmd->add_option("--out", monitor.out, "Run directory");

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("gridsearch", "Search a hyper-parameter grid with early termination");
    grid_cmd->add_option("--space", grid.space_file, "Hyper-parameter space JSON")->required();
    add_schedule_options(grid_cmd, grid.schedule);
    add_monitor_options(grid_cmd, grid.monitor);
    grid_cmd->add_option("--traces", grid.traces, "Traces per epoch");
    grid_cmd->add_option("--keyspace", grid.keyspace, "Keyspace size");
    grid_cmd->add_option("--true-key", grid.true_key, "True key byte");
    grid_cmd->add_option("--attacks", grid.attacks, "Attack repetitions (one value, or one per repeat)");
    grid_cmd->add_option("--step", grid.step, "Checkpoint spacing");
    grid_cmd->add_option("--max-traces", grid.max_traces, "Traces per repetition");
    grid_cmd->add_option("--repeat", grid.repeat, "Rerun the search this many times with derived seeds");
    grid_cmd->add_option("--seed", grid.seed, "Root RNG seed");
    grid_cmd->add_option("--out", grid.out, "Run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        ges::set_thread_count(resolve_threads(threads));
        if (bench_cmd->parsed()) return cmd_bench(bench);
        if (sim_cmd->parsed()) return cmd_simulate(simulate);
        if (mon_cmd->parsed()) return cmd_monitor(monitor);
        return cmd_gridsearch(grid);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
