#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rb/cli.hpp"

using namespace rb;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("rb_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_plan(const fs::path& dir, const std::string& name,
                    const std::string& text) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path only_run_dir(const fs::path& out) {
    for (const auto& e : fs::directory_iterator(out))
        if (e.is_directory()) return e.path();
    throw std::runtime_error("no run directory under " + out.string());
}

}  // namespace

TEST_CASE("plan validation: defaults, missing seed, bad fields") {
    // minimal plan gets the documented defaults
    const std::string normalized = cli::validate_plan(
        "srb", R"({"seed": 5, "noise": {"kind": "none"}})");
    const json plan = json::parse(normalized);
    CHECK(plan["k"] == 10000);
    REQUIRE(plan["m_grid"].is_array());
    CHECK(plan["m_grid"].size() == 13);  // 1, 2, ..., 4096
    CHECK(plan["m_grid"][0] == 1);
    CHECK(plan["m_grid"][12] == 4096);
    CHECK(plan["shots"].is_null());

    // seed is mandatory
    CHECK_THROWS_WITH_AS(
        cli::validate_plan("srb", R"({"noise": {"kind": "none"}})"),
        doctest::Contains("seed"), std::runtime_error);

    // negative error rate
    CHECK_THROWS_WITH_AS(
        cli::validate_plan(
            "srb", R"({"seed": 1, "noise": {"kind": "fixed_unitary", "r": -0.001}})"),
        doctest::Contains("'r'"), std::runtime_error);

    // unknown keys are rejected, named
    CHECK_THROWS_WITH_AS(
        cli::validate_plan(
            "srb", R"({"seed": 1, "noise": {"kind": "none"}, "bogus": 3})"),
        doctest::Contains("bogus"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        cli::validate_plan(
            "srb",
            R"({"seed": 1, "noise": {"kind": "none", "oops": 1}})"),
        doctest::Contains("oops"), std::runtime_error);

    // leakage subcommand wants leakage kinds and vice versa
    CHECK_THROWS_AS(cli::validate_plan(
                        "leakage",
                        R"({"seed": 1, "noise": {"kind": "fixed_unitary", "r": 1e-3}})"),
                    std::runtime_error);
    CHECK_THROWS_AS(cli::validate_plan(
                        "srb",
                        R"({"seed": 1, "noise": {"kind": "leakage_fixed", "r": 1e-3}})"),
                    std::runtime_error);

    // malformed JSON
    CHECK_THROWS_AS(cli::validate_plan("srb", "{nope"), std::runtime_error);
    // unknown subcommand
    CHECK_THROWS_AS(cli::validate_plan("frobnicate", R"({"seed": 1})"),
                    std::runtime_error);
}

TEST_CASE("plan hash is stable and content sensitive") {
    const std::string a = cli::validate_plan(
        "srb", R"({"seed": 5, "noise": {"kind": "none"}})");
    const std::string b = cli::validate_plan(
        "srb", R"({"seed": 6, "noise": {"kind": "none"}})");
    CHECK(cli::plan_hash(a) == cli::plan_hash(a));
    CHECK(cli::plan_hash(a) != cli::plan_hash(b));
    CHECK(cli::plan_hash(a).size() == 16);
}

TEST_CASE("srb run: zero noise writes all-ones series and a manifest") {
    const fs::path dir = temp_dir("srb");
    const fs::path plan = write_plan(
        dir, "plan.json",
        R"({"seed": 3, "k": 12, "m_max": 32, "noise": {"kind": "none"}})");

    cli::RunConfig cfg;
    cfg.subcommand = "srb";
    cfg.plan_path = plan.string();
    cfg.out_dir = (dir / "out").string();
    REQUIRE(cli::run(cfg) == cli::kOk);

    const fs::path run = only_run_dir(dir / "out");
    const std::string csv = slurp(run / "series.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        const double f = std::stod(line.substr(comma + 1));
        CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows == 6);  // m = 1..32

    const json manifest = json::parse(slurp(run / "manifest.json"));
    CHECK(manifest["plan"]["k"] == 12);
    CHECK(manifest["exit_code"] == 0);
    REQUIRE(manifest["outputs"].is_array());
    CHECK(manifest.contains("version"));
    for (const auto& name : manifest["outputs"])
        CHECK(fs::exists(run / name.get<std::string>()));
}

TEST_CASE("runs are byte-identical across repeats and thread counts") {
    const fs::path dir = temp_dir("repro");
    const fs::path plan = write_plan(
        dir, "plan.json",
        R"({"seed": 9, "k": 40, "m_max": 64,
            "noise": {"kind": "gaussian_fast", "r": 0.002, "seed": 4}})");

    auto run_once = [&](const std::string& out, int threads) {
        cli::RunConfig cfg;
        cfg.subcommand = "srb";
        cfg.plan_path = plan.string();
        cfg.out_dir = (dir / out).string();
        cfg.threads = threads;
        REQUIRE(cli::run(cfg) == cli::kOk);
        const fs::path run = only_run_dir(dir / out);
        return slurp(run / "series.csv") + slurp(run / "fit.json") +
               slurp(run / "plan.json");
    };
    const std::string first = run_once("a", 1);
    const std::string second = run_once("b", 1);
    const std::string threaded = run_once("c", 4);
    CHECK(first == second);
    CHECK(first == threaded);
}

TEST_CASE("exit codes: io vs schema") {
    cli::RunConfig cfg;
    cfg.subcommand = "srb";
    cfg.plan_path = "/nonexistent/plan.json";
    CHECK(cli::run(cfg) == cli::kIoError);

    const fs::path dir = temp_dir("codes");
    cfg.plan_path =
        write_plan(dir, "bad.json", R"({"seed": 1, "nope": true})").string();
    cfg.out_dir = (dir / "out").string();
    CHECK(cli::run(cfg) == cli::kSchemaError);

    cfg.format = "xml";
    CHECK(cli::run(cfg) == cli::kSchemaError);
}

TEST_CASE("seed override changes the run directory and data") {
    const fs::path dir = temp_dir("seedover");
    const fs::path plan = write_plan(
        dir, "plan.json",
        R"({"seed": 3, "k": 10, "m_max": 16,
            "noise": {"kind": "fixed_unitary", "r": 0.01, "seed": 2}})");
    cli::RunConfig cfg;
    cfg.subcommand = "srb";
    cfg.plan_path = plan.string();
    cfg.out_dir = (dir / "out").string();
    REQUIRE(cli::run(cfg) == cli::kOk);
    cfg.seed_override = 99;
    REQUIRE(cli::run(cfg) == cli::kOk);
    int run_dirs = 0;
    for (const auto& e : fs::directory_iterator(dir / "out"))
        if (e.is_directory()) ++run_dirs;
    CHECK(run_dirs == 2);
}

TEST_CASE("irb run writes both series and the interleaved estimate") {
    const fs::path dir = temp_dir("irb");
    const fs::path plan = write_plan(
        dir, "plan.json",
        R"({"seed": 11, "k": 60, "m_max": 128,
            "noise": {"kind": "gate_dependent_unitary", "r": 1e-3, "seed": 5},
            "interleaved": {"gate": 16,
                            "noise": {"kind": "fixed_unitary", "r": 1e-2, "seed": 6}}})");
    cli::RunConfig cfg;
    cfg.subcommand = "irb";
    cfg.plan_path = plan.string();
    cfg.out_dir = (dir / "out").string();
    cfg.threads = 4;
    REQUIRE(cli::run(cfg) == cli::kOk);
    const fs::path run = only_run_dir(dir / "out");
    CHECK(fs::exists(run / "reference.csv"));
    CHECK(fs::exists(run / "interleaved.csv"));
    const json est = json::parse(slurp(run / "irb_estimate.json"));
    CHECK(est.contains("r_int_estimate"));
    CHECK(est.contains("reliable"));
    CHECK(est.contains("negative"));
    // r_int = 1e-2 is well above the Clifford noise; estimate lands close
    CHECK(est["r_int_estimate"].get<double>() > 3e-3);
    CHECK(est["reliable"].get<bool>());
}

TEST_CASE("distances run emits the three-model CSV in figure order") {
    const fs::path dir = temp_dir("dist");
    const fs::path plan = write_plan(
        dir, "plan.json", R"({"seed": 13, "rates": [1e-3], "draws": 2})");
    cli::RunConfig cfg;
    cfg.subcommand = "distances";
    cfg.plan_path = plan.string();
    cfg.out_dir = (dir / "out").string();
    REQUIRE(cli::run(cfg) == cli::kOk);
    const std::string csv = slurp(only_run_dir(dir / "out") / "distances.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "r,model,distance,draws");
    std::vector<std::string> models;
    std::vector<double> values;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::string r, model, dist, draws;
        std::getline(ls, r, ',');
        std::getline(ls, model, ',');
        std::getline(ls, dist, ',');
        std::getline(ls, draws, ',');
        models.push_back(model);
        values.push_back(std::stod(dist));
    }
    REQUIRE(models.size() == 3);
    CHECK(models[0] == "unitary");
    CHECK(models[1] == "cptp");
    CHECK(models[2] == "amplitude_damping");
    CHECK(values[0] > values[1]);
    CHECK(values[1] > values[2]);
}

TEST_CASE("sweep run reports the concentration-bound contrast") {
    const fs::path dir = temp_dir("sweep");
    const fs::path plan = write_plan(
        dir, "plan.json",
        R"({"seed": 17, "k_values": [10, 100], "m_max": 256,
            "noise": {"kind": "fixed_unitary", "r": 1e-3, "seed": 3}})");
    cli::RunConfig cfg;
    cfg.subcommand = "sweep";
    cfg.plan_path = plan.string();
    cfg.out_dir = (dir / "out").string();
    cfg.threads = 4;
    REQUIRE(cli::run(cfg) == cli::kOk);
    const fs::path run = only_run_dir(dir / "out");
    const json j = json::parse(slurp(run / "sweep.json"));
    CHECK(j["hoeffding_k"].get<std::uint64_t>() == 149786614ULL);
    const std::string csv = slurp(run / "sweep.csv");
    CHECK(csv.find("K,mu,C,r_hat,converged") == 0);
}

TEST_CASE("flicker subcommands produce coherence, psd and series files") {
    const fs::path dir = temp_dir("flicker");
    {
        const fs::path plan = write_plan(
            dir, "ramsey.json",
            R"({"seed": 19, "a_prime": 2e-4, "n_steps": 400,
                "ensemble": 200, "psd_tracks": 20})");
        cli::RunConfig cfg;
        cfg.subcommand = "flicker-ramsey";
        cfg.plan_path = plan.string();
        cfg.out_dir = (dir / "out1").string();
        cfg.threads = 4;
        REQUIRE(cli::run(cfg) == cli::kOk);
        const fs::path run = only_run_dir(dir / "out1");
        CHECK(slurp(run / "coherence.csv").rfind("t,sigma", 0) == 0);
        CHECK(slurp(run / "psd.csv").rfind("f,S", 0) == 0);
        const json j = json::parse(slurp(run / "ramsey.json"));
        CHECK(j.contains("t2_crossing"));
        CHECK(j.contains("gate_fidelity"));
    }
    {
        const fs::path plan = write_plan(
            dir, "rb.json",
            R"({"seed": 23, "a_prime": 2.2e-4, "k": 16, "m_max": 32})");
        cli::RunConfig cfg;
        cfg.subcommand = "flicker-rb";
        cfg.plan_path = plan.string();
        cfg.out_dir = (dir / "out2").string();
        cfg.threads = 4;
        REQUIRE(cli::run(cfg) == cli::kOk);
        const fs::path run = only_run_dir(dir / "out2");
        CHECK(fs::exists(run / "series.csv"));
        CHECK(fs::exists(run / "fit.json"));
        const json extra = json::parse(slurp(run / "flicker_rb.json"));
        CHECK(extra["a_prime"].get<double>() == 2.2e-4);
    }
}

TEST_CASE("json series format") {
    const fs::path dir = temp_dir("fmt");
    const fs::path plan = write_plan(
        dir, "plan.json",
        R"({"seed": 3, "k": 5, "m_max": 8, "noise": {"kind": "none"}})");
    cli::RunConfig cfg;
    cfg.subcommand = "srb";
    cfg.plan_path = plan.string();
    cfg.out_dir = (dir / "out").string();
    cfg.format = "json";
    REQUIRE(cli::run(cfg) == cli::kOk);
    const fs::path run = only_run_dir(dir / "out");
    const json s = json::parse(slurp(run / "series.json"));
    CHECK(s["m"].size() == 4);
    CHECK(s["k"] == 5);
}
