#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgrav/precision.hpp"
#include "qgrav/scenario.hpp"

using namespace qgrav;

namespace {

int fail_config(const std::string& msg) {
    nlohmann::json err;
    err["error"] = "config";
    err["message"] = msg;
    std::cerr << err.dump() << "\n";
    return 1;
}

int fail_analysis(const std::string& kind, const std::string& msg) {
    nlohmann::json err;
    err["error"] = kind;
    err["message"] = msg;
    std::cerr << err.dump() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulsed-optomechanics loop compiler and run-count planner"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    int bch_order = 6, k_order = 2, threads = 1;
    std::string out_path;
    app.add_option("--bch-order", bch_order, "series order for loop composition");
    app.add_option("--k-order", k_order, "cavity-ratio expansion order");
    app.add_option("--threads", threads, "worker threads for windowed sums");
    app.add_option("--out", out_path, "output file or directory");

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "execute analyses from a JSON config");
    run_cmd->add_option("config", config_path, "scenario config path")->required();

    int table_id = 0;
    auto* tables_cmd = app.add_subcommand("tables", "reproduce a published table (1-4)");
    tables_cmd->add_option("id", table_id, "table number")->required();

    std::string sweep_model = "gamma", sweep_loop = "gamma-fourloop",
                sweep_preset = "pikovski-gamma";
    double r_min = -4.0, r_max = 1.0, r_step = 0.1;
    auto* sweep_cmd = app.add_subcommand("sweep-squeezing", "run-count curve over the squeezing parameter");
    sweep_cmd->add_option("--model", sweep_model);
    sweep_cmd->add_option("--loop", sweep_loop);
    sweep_cmd->add_option("--preset", sweep_preset);
    sweep_cmd->add_option("--r-min", r_min);
    sweep_cmd->add_option("--r-max", r_max);
    sweep_cmd->add_option("--r-step", r_step);

    int design_loops = 1, design_targets = 1, design_starts = 64;
    unsigned design_seed = 12345;
    std::string design_model = "gamma", design_preset = "pikovski-gamma";
    auto* design_cmd = app.add_subcommand("design", "solve for loop parameters cancelling leading terms");
    design_cmd->add_option("--loops", design_loops, "1 or 4");
    design_cmd->add_option("--targets", design_targets);
    design_cmd->add_option("--starts", design_starts);
    design_cmd->add_option("--seed", design_seed);
    design_cmd->add_option("--model", design_model);
    design_cmd->add_option("--preset", design_preset);

    unsigned oc_seed = 12345;
    int oc_loops = 8;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "desk-scale matrix oracle vs symbolic phases");
    oracle_cmd->add_option("--seed", oc_seed);
    oracle_cmd->add_option("--loops", oc_loops);

    CLI11_PARSE(app, argc, argv);

    auto emit = [&](const std::string& text) {
        if (out_path.empty()) std::cout << text;
        else scenario::write_file_atomic(out_path, text);
        return 0;
    };

    try {
        if (*run_cmd) {
            scenario::ScenarioConfig config;
            try {
                config = scenario::ScenarioConfig::from_file(config_path);
            } catch (const config_error& e) {
                return fail_config(e.what());
            }
            config.bch_order = bch_order;
            config.k_order = k_order;
            config.threads = threads;
            if (!out_path.empty()) config.output.path = out_path;
            try {
                auto files = scenario::run(config);
                for (const auto& f : files) std::cout << f << "\n";
            } catch (const config_error& e) {
                return fail_config(e.what());
            } catch (const order_out_of_range& e) {
                return fail_analysis("order_out_of_range", e.what());
            } catch (const std::exception& e) {
                return fail_analysis("analysis", e.what());
            }
            return 0;
        }
        if (*tables_cmd) return emit(scenario::table_csv(table_id, threads));
        if (*sweep_cmd) {
            Deformation model = sweep_model == "beta"    ? Deformation::beta
                                : sweep_model == "mu"    ? Deformation::mu
                                                         : Deformation::gamma;
            std::vector<double> grid;
            for (double r = r_min; r <= r_max + 1e-12; r += r_step) grid.push_back(r);
            return emit(scenario::sweep_csv(model, sweep_loop, params_preset(sweep_preset), grid));
        }
        if (*design_cmd) {
            scenario::ScenarioConfig c;
            c.model = design_model == "beta"  ? Deformation::beta
                      : design_model == "mu"  ? Deformation::mu
                                              : Deformation::gamma;
            c.params = params_preset(design_preset);
            c.design = {design_loops, design_targets, design_starts};
            c.seed = design_seed;
            c.analyses = {"design"};
            c.output.path = out_path.empty() ? "." : out_path;
            auto files = scenario::run(c);
            for (const auto& f : files) std::cout << f << "\n";
            return 0;
        }
        if (*oracle_cmd) return emit(scenario::oracle_check_csv(oc_seed, oc_loops, threads));
        std::cout << app.help();
        return 0;
    } catch (const config_error& e) {
        return fail_config(e.what());
    } catch (const order_out_of_range& e) {
        return fail_analysis("order_out_of_range", e.what());
    } catch (const std::exception& e) {
        return fail_analysis("analysis", e.what());
    }
}
