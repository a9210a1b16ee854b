#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "flowerbed/bounds.hpp"
#include "flowerbed/config.hpp"
#include "flowerbed/seeds.hpp"
#include "flowerbed/serialize.hpp"
#include "flowerbed/shortening.hpp"
#include "flowerbed/svg.hpp"

namespace flowerbed {

// One experiment row. `satisfied` records whether certify() accepted the
// final flower against the theorem bounds; failed seeds carry the error text
// instead of aborting the batch.
struct SeedResult {
    int index = 0;
    std::string kind;  // flower | cage2 | cage3 | file
    FlowOutcome outcome = FlowOutcome::IterationLimit;
    double length = 0.0;
    double defect = 0.0;
    double residual = 0.0;
    bool satisfied = false;
    std::string error;
    FlowTrace trace;
};

struct RunSummary {
    std::vector<SeedResult> results;
    std::vector<std::string> files_written;
    std::string summary_csv;
};

namespace detail {

struct SeedJob {
    std::string kind;
    Flower flower;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

}  // namespace detail

// Builds the seed list, flows every seed (independent seeds in parallel,
// results merged in seed order so outputs are deterministic), certifies, and
// writes the per-seed artifacts plus a summary table.
inline RunSummary run_experiment(const ExperimentConfig& cfg) {
    ManifoldPtr mp = make_manifold(cfg.model_kind, cfg.model_params);
    const Manifold& m = *mp;

    std::vector<detail::SeedJob> jobs;
    for (const auto& path : cfg.flower_files) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open seed file: " + path);
        ojson j = ojson::parse(in);
        jobs.push_back({"file", flower_from_json(j)});
    }
    for (const auto& path : cfg.cage_files) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open seed file: " + path);
        ojson j = ojson::parse(in);
        jobs.push_back({"file", cage_to_flower(m, cage_from_json(j))});
    }
    for (int i = 0; i < cfg.random_flowers; ++i)
        jobs.push_back({"flower", seeds::random_flower(m, cfg.rng_seed + uint64_t(i))});
    for (int i = 0; i < cfg.random_cages; ++i) {
        int dim = (i % 2 == 0) ? 2 : 3;
        Cage c = seeds::random_cage(m, dim, cfg.rng_seed + 1000003u + uint64_t(i));
        jobs.push_back({dim == 2 ? "cage2" : "cage3", cage_to_flower(m, c)});
    }

    RunSummary run;
    run.results.resize(jobs.size());

    unsigned nthreads = cfg.threads > 0 ? unsigned(cfg.threads)
                                        : std::thread::hardware_concurrency();
    if (nthreads == 0) nthreads = 1;
    nthreads = std::min<unsigned>(nthreads, std::max<size_t>(jobs.size(), 1));

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            SeedResult& r = run.results[i];
            r.index = int(i);
            r.kind = jobs[i].kind;
            try {
                r.trace = flow(m, jobs[i].flower, cfg.flow);
                r.outcome = r.trace.outcome;
                r.length = r.trace.final_certificate.total_length;
                r.defect = r.trace.final_certificate.defect_norm;
                r.residual = r.trace.final_certificate.max_edge_residual;
                try {
                    certify(m, r.trace, cfg.certify_delta, cfg.flow.tol_v,
                            cfg.flow.tol_e);
                    r.satisfied = true;
                } catch (const NotCertifiedError&) {
                    r.satisfied = false;
                }
            } catch (const Error& e) {
                r.error = e.what();
            }
        }
    };
    if (nthreads <= 1 || jobs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Outputs, in seed order.
    namespace fs = std::filesystem;
    if (cfg.emit_csv || cfg.emit_json || cfg.emit_svg)
        fs::create_directories(cfg.out_dir);
    for (size_t i = 0; i < jobs.size(); ++i) {
        const SeedResult& r = run.results[i];
        if (!r.error.empty()) continue;
        std::string stem = cfg.out_dir + "/seed_" + std::to_string(i);
        if (cfg.emit_csv) {
            detail::write_text_file(stem + "_trace.csv", trace_to_csv(m, r.trace));
            run.files_written.push_back(stem + "_trace.csv");
        }
        if (cfg.emit_json) {
            detail::write_text_file(stem + "_flower.json",
                                    flower_to_json(m, r.trace.final_flower).dump(2) + "\n");
            run.files_written.push_back(stem + "_flower.json");
        }
        if (cfg.emit_svg && m.dim() == 2) {
            detail::write_text_file(stem + "_final.svg",
                                    flower_to_svg(m, r.trace.final_flower));
            run.files_written.push_back(stem + "_final.svg");
        }
    }

    std::string csv = "seed,kind,outcome,length,defect,residual,satisfied,error\n";
    for (const auto& r : run.results) {
        csv += std::to_string(r.index) + "," + r.kind + ",";
        if (r.error.empty()) {
            csv += std::string(to_string(r.outcome)) + "," + fmt_g17(r.length) + "," +
                   fmt_g17(r.defect) + "," + fmt_g17(r.residual) + "," +
                   (r.satisfied ? "true" : "false") + ",";
        } else {
            std::string msg = r.error;
            for (auto& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            csv += "error,,,,," + msg;
        }
        csv += "\n";
    }
    run.summary_csv = csv;
    if (cfg.emit_csv) {
        detail::write_text_file(cfg.out_dir + "/summary.csv", csv);
        run.files_written.push_back(cfg.out_dir + "/summary.csv");
    }
    return run;
}

}  // namespace flowerbed
