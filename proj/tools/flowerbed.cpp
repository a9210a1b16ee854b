// flowerbed command line tool: run experiments from a config file, slice
// model ends, and print the theorem's bound arithmetic.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowerbed/flowerbed.hpp"

namespace fb = flowerbed;

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const auto& kv : kvs) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw fb::Error("--param expects key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        char* end = nullptr;
        double v = std::strtod(kv.c_str() + eq + 1, &end);
        if (end == kv.c_str() + eq + 1 || *end != '\0')
            throw fb::Error("--param " + key + ": bad number");
        out[key] = v;
    }
    return out;
}

int cmd_run(const std::string& config_path) {
    fb::ExperimentConfig cfg = fb::parse_config_file(config_path);
    fb::RunSummary run = fb::run_experiment(cfg);

    std::printf("%-5s %-7s %-18s %-14s %-12s %-9s\n", "seed", "kind", "outcome",
                "length", "defect", "satisfied");
    int failures = 0;
    for (const auto& r : run.results) {
        if (!r.error.empty()) {
            std::printf("%-5d %-7s %-18s %s\n", r.index, r.kind.c_str(), "error",
                        r.error.c_str());
            ++failures;
            continue;
        }
        std::printf("%-5d %-7s %-18s %-14.8g %-12.4g %-9s\n", r.index,
                    r.kind.c_str(), fb::to_string(r.outcome), r.length, r.defect,
                    r.satisfied ? "true" : "false");
    }
    std::printf("%zu seeds, %d errors, outputs in %s\n", run.results.size(),
                failures, cfg.out_dir.c_str());
    return failures == 0 ? 0 : 1;
}

int cmd_slice(const std::string& model, double eps,
              const std::vector<std::string>& params, const std::string& out_path) {
    fb::ManifoldPtr m = fb::make_manifold(model, parse_params(params));
    fb::EndSlice s = fb::find_small_slice(*m, eps);
    std::string csv = fb::slice_to_csv(*m, s);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw fb::Error("cannot write " + out_path);
        out << csv;
    }
    std::printf("%s", csv.c_str());
    std::fprintf(stderr, "end %d sliced at r = %.12g (level volume %.6g, tail %.6g)\n",
                 s.end_id, s.r, s.level_volume, s.volume_beyond);
    return 0;
}

int cmd_bounds(int n, double vol, double delta, bool as_json) {
    fb::BoundReport r = fb::delta_bookkeeping(n, vol, delta);
    if (as_json)
        std::printf("%s\n", fb::bound_report_to_json(r).dump(2).c_str());
    else
        std::printf("%s", fb::bound_report_table(r).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geodesic flower search on model manifolds"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "experiment config file")->required();

    std::string model = "cusp", slice_out;
    double eps = 1e-3;
    std::vector<std::string> params;
    auto* slice = app.add_subcommand("slice", "find a small end slice");
    slice->add_option("--model", model, "model kind (sphere|torus|cusp|cusp2|warped3)");
    slice->add_option("--eps", eps, "target slice volume")->required();
    slice->add_option("--param", params, "model parameter key=value (repeatable)");
    slice->add_option("--out", slice_out, "also write the CSV report here");

    int n = 2;
    double vol = 1.0, delta = 0.0;
    bool as_json = false;
    auto* bounds = app.add_subcommand("bounds", "print the length-bound arithmetic");
    bounds->add_option("--n", n, "manifold dimension")->required();
    bounds->add_option("--vol", vol, "total volume")->required();
    bounds->add_option("--delta", delta, "slack budget");
    bounds->add_flag("--json", as_json, "emit JSON instead of the table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (slice->parsed()) return cmd_slice(model, eps, params, slice_out);
        if (bounds->parsed()) return cmd_bounds(n, vol, delta, as_json);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
