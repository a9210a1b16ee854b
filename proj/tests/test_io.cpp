#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flowerbed/flowerbed.hpp"

using namespace flowerbed;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int status = -1;
    std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
    std::array<char, 4096> buf{};
    CmdResult r;
    FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!p) return r;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    r.status = WEXITSTATUS(pclose(p));
    return r;
}

fs::path fresh_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("flowerbed_test_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool points_equal(const ChartPoint& a, const ChartPoint& b) {
    return a.chart == b.chart && a.x == b.x;
}

}  // namespace

TEST_CASE("flower json round trips bit for bit") {
    auto m = make_manifold("sphere");
    Flower f = seeds::random_flower(*m, 9);
    ojson j = flower_to_json(*m, f);
    Flower g = flower_from_json(ojson::parse(j.dump()));
    REQUIRE(points_equal(f.vertex, g.vertex));
    REQUIRE(f.edges.size() == g.edges.size());
    for (size_t e = 0; e < f.edges.size(); ++e) {
        REQUIRE(f.edges[e].points.size() == g.edges[e].points.size());
        for (size_t i = 0; i < f.edges[e].points.size(); ++i)
            REQUIRE(points_equal(f.edges[e].points[i], g.edges[e].points[i]));
        REQUIRE(f.edges[e].seg_lengths == g.edges[e].seg_lengths);
    }
    REQUIRE(j.at("model") == "sphere(r=1)");
    REQUIRE(j.at("dim") == 2);
}

TEST_CASE("cage json round trips and types are enforced") {
    auto m = make_manifold("torus");
    Cage c = seeds::random_cage(*m, 3, 4);
    ojson j = cage_to_json(*m, c);
    Cage d = cage_from_json(ojson::parse(j.dump()));
    REQUIRE(d.simplex_dim == 3);
    REQUIRE(d.vertices.size() == c.vertices.size());
    REQUIRE(d.edges.size() == c.edges.size());
    for (const auto& [key, curve] : c.edges) {
        REQUIRE(d.edges.count(key) == 1);
        REQUIRE(d.edges.at(key).points.size() == curve.points.size());
        for (size_t i = 0; i < curve.points.size(); ++i)
            REQUIRE(points_equal(d.edges.at(key).points[i], curve.points[i]));
    }
    REQUIRE_THROWS_AS(flower_from_json(j), Error);
    REQUIRE_THROWS_AS(cage_from_json(flower_to_json(*m, cage_to_flower(*m, c))), Error);
}

TEST_CASE("trace csv uses a fixed header and exact decimals") {
    FlatTorus t(1.0, 1.0);
    FlowTrace trace;
    trace.records.push_back({0, 1.5, 0.25, 0.0, {0, {0.125, 0.5, 0}}});
    trace.records.push_back({1, 1.25, 0.0625, 0.0, {0, {0.25, 0.5, 0}}});
    std::string csv = trace_to_csv(t, trace);
    REQUIRE(csv ==
            "iter,length,defect,vertex_chart,vx0,vx1\n"
            "0,1.5,0.25,0,0.125,0.5\n"
            "1,1.25,0.0625,0,0.25,0.5\n");
}

TEST_CASE("slice csv lists every end at the chosen radius") {
    auto c = make_manifold("cusp2");
    EndSlice s = find_small_slice(*c, 1e-3);
    std::string csv = slice_to_csv(*c, s);
    REQUIRE(csv.rfind("r,end_1,end_2,total\n", 0) == 0);
    // Parse the data row back: both ends sit at the same level by symmetry.
    std::istringstream row(csv.substr(csv.find('\n') + 1));
    std::string cell;
    std::getline(row, cell, ',');
    REQUIRE(std::stod(cell) == Catch::Approx(s.r));
    std::getline(row, cell, ',');
    double e1 = std::stod(cell);
    std::getline(row, cell, ',');
    double e2 = std::stod(cell);
    std::getline(row, cell, ',');
    REQUIRE(e1 <= 1e-3);
    REQUIRE(e1 == Catch::Approx(e2));
    REQUIRE(std::stod(cell) == Catch::Approx(e1 + e2));
}

TEST_CASE("bound report renders both table and json forms") {
    BoundReport r = delta_bookkeeping(2, 1.0, 0.0);
    std::string table = bound_report_table(r);
    REQUIRE(table.find("main_bound         12\n") != std::string::npos);
    REQUIRE(table.find("edge_budget        6\n") != std::string::npos);
    std::string js = bound_report_to_json(r).dump();
    // Declared key order is part of the output contract.
    REQUIRE(js.find("\"n\"") < js.find("\"volume\""));
    REQUIRE(js.find("\"volume\"") < js.find("\"main_bound\""));
    REQUIRE(js.find("\"main_bound\"") < js.find("\"total_bound\""));
}

TEST_CASE("config parsing: defaults, comments, and layered keys") {
    ExperimentConfig d = parse_config_text("", "empty.cfg");
    REQUIRE(d.model_kind == "sphere");
    REQUIRE(d.random_flowers == 0);
    REQUIRE(d.emit_csv);
    REQUIRE_FALSE(d.emit_svg);

    std::string text =
        "# experiment\n"
        "model = cusp\n"
        "model.rate = 1.5   # decay\n"
        "\n"
        "seeds.random = 12\n"
        "seeds.cages = 4\n"
        "seeds.rng = 99\n"
        "flow.max_iters = 77\n"
        "flow.tol_v = 2e-5\n"
        "certify.delta = 0.01\n"
        "output.dir = /tmp/xyz\n"
        "emit.svg = true\n"
        "threads = 2\n";
    ExperimentConfig cfg = parse_config_text(text, "demo.cfg");
    REQUIRE(cfg.model_kind == "cusp");
    REQUIRE(cfg.model_params.at("rate") == 1.5);
    REQUIRE(cfg.random_flowers == 12);
    REQUIRE(cfg.random_cages == 4);
    REQUIRE(cfg.rng_seed == 99);
    REQUIRE(cfg.flow.max_iters == 77);
    REQUIRE(cfg.flow.tol_v == 2e-5);
    REQUIRE(cfg.certify_delta == 0.01);
    REQUIRE(cfg.out_dir == "/tmp/xyz");
    REQUIRE(cfg.emit_svg);
    REQUIRE(cfg.threads == 2);
}

TEST_CASE("config errors carry the file and line") {
    try {
        parse_config_text("model = torus\nwobble = 3\n", "bad.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.line_no == 2);
        REQUIRE(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
        REQUIRE(std::string(e.what()).find("wobble") != std::string::npos);
    }

    REQUIRE_THROWS_AS(parse_config_text("model torus\n", "x.cfg"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("flow.tol_v = fast\n", "x.cfg"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("model =\n", "x.cfg"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("model = a\nmodel = b\n", "x.cfg"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("flow.max_iters = 0\n", "x.cfg"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("seeds.random = -2\n", "x.cfg"), ConfigError);
}

TEST_CASE("config writer is the parser's inverse") {
    ExperimentConfig cfg;
    cfg.model_kind = "torus";
    cfg.model_params = {{"lx", 2.0}, {"ly", 0.75}};
    cfg.random_flowers = 5;
    cfg.random_cages = 3;
    cfg.rng_seed = 1234;
    cfg.flow.k_subdiv = 13;
    cfg.flow.max_iters = 50;
    cfg.flow.tol_v = 3e-5;
    cfg.certify_delta = 0.5;
    cfg.out_dir = "results";
    cfg.emit_svg = true;
    cfg.threads = 4;
    ExperimentConfig back = parse_config_text(write_config(cfg), "rt.cfg");
    REQUIRE(write_config(back) == write_config(cfg));
    REQUIRE(back.model_params.at("ly") == 0.75);
    REQUIRE(back.flow.k_subdiv == 13);
}

TEST_CASE("experiments write deterministic artifacts") {
    fs::path d1 = fresh_dir("runA");
    fs::path d2 = fresh_dir("runB");
    ExperimentConfig cfg;
    cfg.model_kind = "torus";
    cfg.random_flowers = 3;
    cfg.random_cages = 2;
    cfg.rng_seed = 7;
    cfg.flow.max_iters = 8;
    cfg.emit_svg = true;
    cfg.threads = 2;

    cfg.out_dir = d1.string();
    RunSummary a = run_experiment(cfg);
    cfg.out_dir = d2.string();
    RunSummary b = run_experiment(cfg);

    REQUIRE(a.results.size() == 5);
    REQUIRE(a.summary_csv == b.summary_csv);
    for (int i = 0; i < 5; ++i) {
        std::string stem = "seed_" + std::to_string(i);
        REQUIRE(slurp(d1 / (stem + "_trace.csv")) == slurp(d2 / (stem + "_trace.csv")));
        REQUIRE(slurp(d1 / (stem + "_flower.json")) ==
                slurp(d2 / (stem + "_flower.json")));
        REQUIRE(slurp(d1 / (stem + "_final.svg")) == slurp(d2 / (stem + "_final.svg")));
    }
    std::string summary = slurp(d1 / "summary.csv");
    REQUIRE(summary.rfind("seed,kind,outcome,length,defect,residual,satisfied,error\n",
                          0) == 0);
    REQUIRE(std::count(summary.begin(), summary.end(), '\n') == 6);
    // Kinds appear in seed order: flowers first, then alternating cages.
    REQUIRE(summary.find("0,flower,") != std::string::npos);
    REQUIRE(summary.find("3,cage2,") != std::string::npos);
    REQUIRE(summary.find("4,cage3,") != std::string::npos);

    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("claimed certifications can be recomputed from the artifacts") {
    fs::path d = fresh_dir("recheck");
    ExperimentConfig cfg;
    cfg.model_kind = "torus";
    cfg.random_flowers = 4;
    cfg.rng_seed = 11;
    cfg.flow.max_iters = 25;
    cfg.out_dir = d.string();
    RunSummary run = run_experiment(cfg);

    auto m = make_manifold(cfg.model_kind);
    BoundReport bounds = delta_bookkeeping(m->dim(), m->total_volume(),
                                           cfg.certify_delta);
    for (const auto& r : run.results) {
        if (!r.satisfied) continue;
        ojson j = ojson::parse(
            slurp(d / ("seed_" + std::to_string(r.index) + "_flower.json")));
        Flower f = flower_from_json(j);
        auto cert = stationarity_defect(*m, f);
        REQUIRE(cert.defect_norm <= cfg.flow.tol_v * 1.01 + 1e-9);
        REQUIRE(cert.max_edge_residual <= cfg.flow.tol_e * 1.01 + 1e-9);
        REQUIRE(cert.total_length <= bounds.total_bound + 1e-6);
        REQUIRE(int(f.edges.size()) <= bounds.edges);
    }
    fs::remove_all(d);
}

TEST_CASE("svg output is a self contained drawing") {
    FlatTorus t(1.0, 1.0);
    Flower f = seeds::torus_wedge(t, 0.02, 3);
    std::string svg = flower_to_svg(t, f);
    REQUIRE(svg.rfind("<svg", 0) == 0);
    REQUIRE(svg.find("</svg>") != std::string::npos);
    REQUIRE(svg.find("polyline") != std::string::npos);

    auto c = make_manifold("cusp");
    Flower g = seeds::neck_circle(*c, 1.6, 12, 0.05);
    std::string svg2 = flower_to_svg(*c, g);
    REQUIRE(svg2.find("</svg>") != std::string::npos);
}

TEST_CASE("the cli prints bounds, slices, and runs experiments") {
    std::string cli = FLOWERBED_CLI_PATH;

    CmdResult bounds = run_cmd("'" + cli + "' bounds --n 2 --vol 1");
    REQUIRE(bounds.status == 0);
    REQUIRE(bounds.out.find("main_bound         12\n") != std::string::npos);
    REQUIRE(bounds.out.find("edge_budget        6\n") != std::string::npos);

    CmdResult bounds3 = run_cmd("'" + cli + "' bounds --n 3 --vol 1 --json");
    REQUIRE(bounds3.status == 0);
    ojson bj = ojson::parse(bounds3.out);
    REQUIRE(bj.at("main_bound") == 30.0);
    REQUIRE(bj.at("edge_budget") == 10);

    CmdResult slice = run_cmd("'" + cli + "' slice --model cusp --eps 1e-3");
    REQUIRE(slice.status == 0);
    REQUIRE(slice.out.rfind("r,end_1,total\n", 0) == 0);
    double r = std::stod(slice.out.substr(slice.out.find('\n') + 1));
    REQUIRE(r == Catch::Approx(std::log(kTwoPi / 1e-3)).margin(1e-6));

    CmdResult missing = run_cmd("'" + cli + "' slice --model sphere --eps 1e-3");
    REQUIRE(missing.status != 0);

    fs::path d = fresh_dir("cli_run");
    fs::path cfg_path = d / "exp.cfg";
    {
        std::ofstream out(cfg_path);
        out << "model = torus\nseeds.random = 2\nflow.max_iters = 6\n"
            << "output.dir = " << (d / "out").string() << "\n";
    }
    CmdResult run = run_cmd("'" + cli + "' run '" + cfg_path.string() + "'");
    REQUIRE(run.status == 0);
    REQUIRE(run.out.find("outcome") != std::string::npos);
    REQUIRE(fs::exists(d / "out" / "summary.csv"));
    REQUIRE(fs::exists(d / "out" / "seed_0_trace.csv"));
    REQUIRE(fs::exists(d / "out" / "seed_1_flower.json"));
    fs::remove_all(d);
}
