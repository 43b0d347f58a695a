// Command-line frontend for the map-predictive planning library.
//
// Every subcommand takes --config (key = value file), --seed and --out-dir;
// command-specific settings come from the config file so experiment setups
// stay reproducible from a single text file.
#include <CLI11.hpp>

#include "mappred/cnp_io.hpp"
#include "mappred/config.hpp"
#include "mappred/dataset.hpp"
#include "mappred/experiment.hpp"
#include "mappred/runlog.hpp"
#include "mappred/svg.hpp"
#include "mappred/train.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace mappred;

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

void add_common(CLI::App *cmd, CommonArgs &args) {
    cmd->add_option("--config", args.config_path, "key = value settings file");
    cmd->add_option("--seed", args.seed, "base random seed");
    cmd->add_option("--out-dir", args.out_dir, "output directory");
}

Config load_config(const CommonArgs &args) {
    return args.config_path.empty() ? Config() : Config::load(args.config_path);
}

fs::path ensure_out_dir(const CommonArgs &args) {
    fs::path dir(args.out_dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::uint64_t> seed_list(const Config &cfg, const CommonArgs &args,
                                     const char *count_key) {
    if (cfg.has("maze_seeds")) {
        std::vector<std::uint64_t> out;
        for (double d : cfg.get_double_list("maze_seeds"))
            out.push_back(static_cast<std::uint64_t>(d));
        return out;
    }
    long long count = cfg.get_int(count_key, 1);
    std::vector<std::uint64_t> out;
    for (long long i = 0; i < count; ++i)
        out.push_back(args.seed + static_cast<std::uint64_t>(i));
    return out;
}

MazeSpec spec_from_config(const Config &cfg, std::uint64_t seed) {
    return default_maze_spec(seed, cfg.get_double("extent", 15.0),
                             cfg.get_double("hallway_width", 2.5),
                             cfg.get_double("resolution", 0.25));
}

int cmd_mazegen(const CommonArgs &args) {
    Config cfg = load_config(args);
    fs::path dir = ensure_out_dir(args);
    for (std::uint64_t s : seed_list(cfg, args, "count")) {
        MazeSpec spec = spec_from_config(cfg, s);
        OccupancyGrid grid = generate_maze(spec, cfg.get_double("resolution", 0.25));
        std::string stem = "maze_" + std::to_string(s);
        save_gridmap(grid, (dir / (stem + ".grid")).string());
        std::ofstream spec_out(dir / (stem + ".spec"));
        save_maze_spec(spec, spec_out);
        std::cout << stem << ": " << grid.width << "x" << grid.height << " cells\n";
    }
    return 0;
}

int cmd_dataset(const CommonArgs &args) {
    Config cfg = load_config(args);
    fs::path dir = ensure_out_dir(args);
    std::vector<OccupancyGrid> maps;
    double res = cfg.get_double("resolution", 0.25);
    for (std::uint64_t s : seed_list(cfg, args, "maze_count"))
        maps.push_back(generate_maze(spec_from_config(cfg, s), res));
    auto ds = make_dataset(maps, static_cast<int>(cfg.get_int("samples_per_map", 10)),
                           cfg.get_double("sensor_range", 7.5),
                           cfg.get_double("prediction_radius", 5.0), args.seed);
    std::string path = (dir / cfg.get_string("dataset_file", "dataset.bin")).string();
    save_dataset(ds, path);
    std::cout << "wrote " << ds.size() << " examples to " << path << "\n";
    return 0;
}

int cmd_train(const CommonArgs &args) {
    Config cfg = load_config(args);
    fs::path dir = ensure_out_dir(args);
    auto ds = load_dataset(cfg.get_string("dataset"));
    TrainConfig tc;
    tc.iterations = static_cast<int>(cfg.get_int("iterations", 20000));
    tc.batch_size = static_cast<int>(cfg.get_int("batch_size", 4));
    tc.learning_rate = cfg.get_double("learning_rate", 1e-4);
    tc.seed = args.seed;
    CnpModel model = CnpModel::make(args.seed);
    std::vector<double> losses = cnp_train(model, ds, tc);
    std::string wpath = (dir / cfg.get_string("weights_file", "cnp.weights")).string();
    save_cnp(model, wpath);
    std::ofstream loss_out(dir / "loss.csv");
    loss_out << "iteration,nll\n";
    loss_out.precision(17);
    for (std::size_t i = 0; i < losses.size(); ++i)
        loss_out << i << ',' << losses[i] << '\n';
    std::cout << "trained " << tc.iterations << " iterations, final nll "
              << losses.back() << ", weights at " << wpath << "\n";
    return 0;
}

int cmd_predict(const CommonArgs &args) {
    Config cfg = load_config(args);
    fs::path dir = ensure_out_dir(args);
    CnpModel model = load_cnp(cfg.get_string("weights"));
    std::ifstream grid_in(cfg.get_string("map"));
    if (!grid_in)
        throw IoError("cannot open map " + cfg.get_string("map"));
    OccupancyGrid truth = load_gridmap(grid_in);
    Vec2 pose(cfg.get_double("pose_x"), cfg.get_double("pose_y"));
    OccupancyGrid belief = OccupancyGrid::unknown_like(truth);
    simulate_lidar(truth, belief, pose, cfg.get_double("sensor_range", 7.5));
    FrontierSet frontiers = extract_frontiers(belief);
    QuerySet q = build_query(belief, pose, frontiers,
                             cfg.get_double("sensor_range", 7.5),
                             cfg.get_double("prediction_radius", 5.0));
    std::vector<double> phi = cnp_predict(model, q);
    std::ofstream out(dir / "prediction.csv");
    out << "x,y,phi\n";
    out.precision(17);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        Vec2 p = truth.cell_center(q.target_cells[i]);
        out << p.x() << ',' << p.y() << ',' << phi[i] << '\n';
    }
    std::cout << "predicted " << phi.size() << " cells\n";
    return 0;
}

SimConfig sim_from_config(const Config &cfg) {
    SimConfig sim;
    sim.vehicle.v_max = cfg.get_double("v_max", sim.vehicle.v_max);
    sim.sensor_range = cfg.get_double("sensor_range", sim.sensor_range);
    sim.prediction_radius = cfg.get_double("prediction_radius", sim.prediction_radius);
    sim.replan_period = cfg.get_double("replan_period", sim.replan_period);
    sim.goal_radius = cfg.get_double("goal_radius", sim.goal_radius);
    sim.timeout_factor = cfg.get_double("timeout_factor", sim.timeout_factor);
    sim.alpha = cfg.get_double("alpha", sim.alpha);
    sim.eps = cfg.get_double("eps", sim.eps);
    sim.lidar_beams = static_cast<int>(cfg.get_int("lidar_beams", sim.lidar_beams));
    return sim;
}

std::optional<CnpModel> maybe_model(const Config &cfg) {
    if (!cfg.has("weights"))
        return std::nullopt;
    return load_cnp(cfg.get_string("weights"));
}

int cmd_simulate(const CommonArgs &args) {
    Config cfg = load_config(args);
    fs::path dir = ensure_out_dir(args);
    MazeSpec spec = spec_from_config(cfg, args.seed);
    OccupancyGrid maze = generate_maze(spec, cfg.get_double("resolution", 0.25));
    SimConfig sim = sim_from_config(cfg);
    sim.strategy = parse_strategy(cfg.get_string("strategy", "cnp"));
    sim.start = spec.start;
    sim.goal = spec.goal;
    std::optional<CnpModel> model = maybe_model(cfg);
    if (sim.strategy == Strategy::Cnp && !model)
        throw ConfigError("simulate: cnp strategy needs a weights file");
    RunLog log = run_episode(maze, sim, model ? &*model : nullptr);
    log.maze_seed = args.seed;
    save_runlog((dir / "runlog.json").string(), log);
    save_executed_csv((dir / "executed.csv").string(), log);
    Trajectory optimal = optimal_reference(maze, sim).first;
    save_trajectory_csv((dir / "optimal_trajectory.csv").string(), optimal);
    std::cout << (log.success ? "success" : "failure: " + log.failure_reason)
              << ", completion " << log.completion_time << " s, optimal "
              << log.t_opt << " s\n";
    return log.success ? 0 : 1;
}

int cmd_evaluate(const CommonArgs &args) {
    Config cfg = load_config(args);
    fs::path dir = ensure_out_dir(args);
    ExperimentConfig exp;
    for (double d : cfg.get_double_list("maze_seeds"))
        exp.maze_seeds.push_back(static_cast<std::uint64_t>(d));
    exp.maze_extent = cfg.get_double("extent", 15.0);
    exp.hallway_width = cfg.get_double("hallway_width", 2.5);
    exp.resolution = cfg.get_double("resolution", 0.25);
    for (const std::string &s : cfg.get_string_list("strategies"))
        exp.strategies.push_back(parse_strategy(s));
    if (cfg.has("v_max_list"))
        exp.v_max_list = cfg.get_double_list("v_max_list");
    if (cfg.has("sensor_ranges")) {
        std::vector<double> sr = cfg.get_double_list("sensor_ranges");
        std::vector<double> pr = cfg.get_double_list("prediction_radii");
        if (sr.size() != pr.size())
            throw ConfigError("evaluate: sensor_ranges and prediction_radii "
                              "must have equal length");
        exp.range_pairs.clear();
        for (std::size_t i = 0; i < sr.size(); ++i)
            exp.range_pairs.emplace_back(sr[i], pr[i]);
    }
    exp.seed = args.seed;
    exp.out_dir = dir.string();
    exp.base = sim_from_config(cfg);
    std::optional<CnpModel> model = maybe_model(cfg);
    SummaryTable table = run_experiment(exp, model ? &*model : nullptr,
                                        static_cast<int>(cfg.get_int("bootstrap", 10000)));
    for (const SummaryRow &r : table.rows)
        std::cout << r.strategy << " v=" << r.v_max << " s=" << r.sensor_range
                  << " p=" << r.prediction_radius << ": mean "
                  << 100.0 * r.mean_relative << "% of optimal, " << r.failures
                  << '/' << r.episodes << " failures\n";
    return 0;
}

int cmd_plot(const CommonArgs &args) {
    Config cfg = load_config(args);
    fs::path dir = ensure_out_dir(args);
    SummaryTable table = load_summary_csv(cfg.get_string("summary"));
    if (table.rows.empty())
        throw ConfigError("plot: summary has no rows");

    // group rows by (v_max, ranges) for the bar/timing charts
    std::vector<SummaryRow> standard;
    double v0 = table.rows.front().v_max;
    double s0 = table.rows.front().sensor_range;
    double p0 = table.rows.front().prediction_radius;
    for (const SummaryRow &r : table.rows)
        if (r.v_max == v0 && r.sensor_range == s0 && r.prediction_radius == p0)
            standard.push_back(r);
    plot_relative_bars((dir / "relative_time.svg").string(), standard,
                       "completion time vs full-knowledge optimal");
    plot_timing_stack((dir / "stage_timings.svg").string(), standard,
                      "mean planning time per stage (s)");

    // heatmap over the range sweep for the first strategy that has one
    std::vector<SummaryRow> sweep;
    for (const SummaryRow &r : table.rows)
        if (r.strategy == table.rows.front().strategy && r.v_max == v0)
            sweep.push_back(r);
    if (sweep.size() > 1)
        plot_range_heatmap((dir / "range_sweep.svg").string(), sweep,
                           "mean relative time over sensing ranges");

    if (cfg.has("runlog") && cfg.has("map")) {
        std::ifstream grid_in(cfg.get_string("map"));
        if (!grid_in)
            throw IoError("cannot open map " + cfg.get_string("map"));
        OccupancyGrid grid = load_gridmap(grid_in);
        RunLog log = load_runlog(cfg.get_string("runlog"));
        plot_trajectory_map((dir / "trajectory.svg").string(), grid, log,
                            cfg.get_double("v_max", 4.0));
    }
    std::cout << "plots written to " << dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"map-predictive motion planning toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs &) = nullptr;
    auto add = [&](const char *name, const char *desc,
                   int (*fn)(const CommonArgs &)) {
        CLI::App *cmd = app.add_subcommand(name, desc);
        add_common(cmd, args);
        cmd->callback([&handler, fn] { handler = fn; });
    };
    add("mazegen", "generate maze grids and specs", cmd_mazegen);
    add("dataset", "build a training dataset from mazes", cmd_dataset);
    add("train", "train the occupancy predictor", cmd_train);
    add("predict", "predict occupancy beyond the frontier for one pose",
        cmd_predict);
    add("simulate", "run one navigation episode", cmd_simulate);
    add("evaluate", "run the experiment grid and summarize", cmd_evaluate);
    add("plot", "render svg plots from a summary", cmd_plot);

    CLI11_PARSE(app, argc, argv);
    try {
        return handler(args);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
