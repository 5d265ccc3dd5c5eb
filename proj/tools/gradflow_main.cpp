#include "gradflow/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace gradflow;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    int substeps_override = 0;
    long seed = 0;  // reserved; all current components are deterministic
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("config", opts.config_path, "scenario config file")->required();
    cmd->add_option("--out-dir", opts.out_dir, "directory for CSV/summary outputs");
    cmd->add_option("--substeps", opts.substeps_override, "override RK4 substeps per interval");
    cmd->add_option("--seed", opts.seed, "reserved for future stochastic components");
}

ScenarioConfig load(const CommonOptions& opts) {
    ScenarioConfig config = load_config(opts.config_path);
    if (opts.substeps_override > 0) {
        config.solver.substeps_per_period = opts.substeps_override;
        config.solver.validate();
    }
    return config;
}

void write_outputs(const ScenarioConfig& config, const ScenarioResult& result,
                   const std::filesystem::path& out_dir, const std::string& suffix = "") {
    std::filesystem::create_directories(out_dir);
    if (!config.outputs.csv_prefix.empty()) {
        for (const auto& traj : result.trajectories) {
            const auto path = out_dir / (config.outputs.csv_prefix + suffix + "_" +
                                         to_string(traj.kind) + ".csv");
            emit_csv(traj, path);
        }
    }
    if (!config.outputs.summary.empty()) {
        auto name = std::filesystem::path(config.outputs.summary);
        if (!suffix.empty()) {
            name = name.stem().string() + suffix + name.extension().string();
        }
        emit_summary(config, result, out_dir / name);
    }
}

void print_result(const std::string& name, const ScenarioResult& result) {
    for (const auto& check : result.checks) {
        std::cout << "[" << (check.pass ? "PASS" : (check.report_only ? "INFO" : "FAIL")) << "] "
                  << name << ": " << check.kind << "\n";
    }
    for (const auto& err : result.errors) std::cout << "[ERROR] " << name << ": " << err << "\n";
}

int exit_code_from(const ScenarioResult& result) {
    if (!result.errors.empty()) return kExitError;
    return result.all_required_pass() ? kExitPass : kExitCheckFailed;
}

int run_simulate(const CommonOptions& opts) {
    ScenarioConfig config = load(opts);
    config.checks.clear();  // trajectories only
    const ScenarioResult result = run_scenario(config);
    write_outputs(config, result, opts.out_dir);
    print_result(config.name, result);
    return result.errors.empty() ? kExitPass : kExitError;
}

int run_check(const CommonOptions& opts) {
    const ScenarioConfig config = load(opts);
    const ScenarioResult result = run_scenario(config);
    write_outputs(config, result, opts.out_dir);
    print_result(config.name, result);
    return exit_code_from(result);
}

int run_order_test(const CommonOptions& opts) {
    ScenarioConfig config = load(opts);
    std::vector<CheckSpec> order_checks;
    for (const auto& check : config.checks)
        if (check.kind == "order_test") order_checks.push_back(check);
    if (order_checks.empty()) {
        CheckSpec spec;
        spec.kind = "order_test";
        order_checks.push_back(spec);
    }
    config.checks = order_checks;
    config.integrators.clear();  // the order test integrates one step per epsilon itself
    const ScenarioResult result = run_scenario(config);
    write_outputs(config, result, opts.out_dir);
    print_result(config.name, result);
    for (const auto& check : result.checks) {
        if (check.details.contains("slope"))
            std::cout << "  slope " << check.details["slope"] << " (min "
                      << check.details["slope_min"] << ")\n";
    }
    return exit_code_from(result);
}

int run_sweep(const CommonOptions& opts, const std::string& param,
              const std::vector<double>& values) {
    const ScenarioConfig base = load(opts);
    if (values.empty()) throw ConfigError("sweep requires at least one value");

    struct Item {
        std::string suffix;
        ScenarioConfig config;
        ScenarioResult result;
    };
    std::vector<Item> items;
    for (double value : values) {
        Item item;
        item.config = base;
        if (param == "gamma")
            item.config.params.gamma = value;
        else if (param == "epsilon")
            item.config.params.epsilon = value;
        else
            throw ConfigError("sweep parameter must be gamma or epsilon, got '" + param + "'");
        item.config.params.validate();
        item.suffix = "_" + param + format_double(value);
        items.push_back(std::move(item));
    }

    std::vector<std::future<ScenarioResult>> futures;
    futures.reserve(items.size());
    for (auto& item : items)
        futures.push_back(std::async(std::launch::async,
                                     [&item] { return run_scenario(item.config); }));
    for (std::size_t i = 0; i < items.size(); ++i) items[i].result = futures[i].get();

    Json merged;
    merged["scenario"] = base.name;
    merged["sweep_parameter"] = param;
    Json runs = Json::array();
    int exit_code = kExitPass;
    for (std::size_t i = 0; i < items.size(); ++i) {
        write_outputs(items[i].config, items[i].result, opts.out_dir, items[i].suffix);
        print_result(base.name + items[i].suffix, items[i].result);
        Json entry = summary_document(items[i].config, items[i].result);
        entry["value"] = values[i];
        runs.push_back(std::move(entry));
        exit_code = std::max(exit_code, exit_code_from(items[i].result));
    }
    merged["runs"] = std::move(runs);
    if (!base.outputs.summary.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        auto name = std::filesystem::path(base.outputs.summary);
        name = name.stem().string() + "_sweep" + name.extension().string();
        std::ofstream file(std::filesystem::path(opts.out_dir) / name, std::ios::binary);
        file << merged.dump(2) << "\n";
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oscillating-feedback motion planner: simulation and verification"};
    app.require_subcommand(1);

    CommonOptions sim_opts, check_opts, order_opts, sweep_opts;
    std::string sweep_param;
    std::vector<double> sweep_values;

    auto* simulate = app.add_subcommand("simulate", "integrate the scenario and export CSV");
    add_common(simulate, sim_opts);
    auto* check = app.add_subcommand("check", "integrate, run declared checks, write summary");
    add_common(check, check_opts);
    auto* order = app.add_subcommand("order-test", "one-step consistency order test");
    add_common(order, order_opts);
    auto* sweep = app.add_subcommand("sweep", "run the scenario across parameter values");
    add_common(sweep, sweep_opts);
    sweep->add_option("--param", sweep_param, "gamma or epsilon")->required();
    sweep->add_option("--values", sweep_values, "parameter values")->required()->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(sim_opts);
        if (check->parsed()) return run_check(check_opts);
        if (order->parsed()) return run_order_test(order_opts);
        if (sweep->parsed()) return run_sweep(sweep_opts, sweep_param, sweep_values);
    } catch (const gradflow::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    } catch (const std::exception& err) {
        std::cerr << "unexpected error: " << err.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
