#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <qsched/stats.hpp>

#include "test_support.hpp"

using namespace qsched;
using qsched::cli::run_cli;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("qsched_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write_config(const std::string& text, const std::string& name = "cfg.json") {
        const auto path = dir_ / name;
        std::ofstream(path) << text;
        return path.string();
    }

    std::string small_reference(std::uint64_t tasks = 2000) {
        auto doc = nlohmann::json::parse(fixtures::kReferenceConfig);
        doc["simulation"]["max_tasks_simulated"] = tasks;
        doc["general"]["working_dir"] = dir_.string();
        return write_config(doc.dump());
    }

    int run(const std::vector<std::string>& args) {
        out_.str("");
        err_.str("");
        return run_cli(args, out_, err_);
    }

    nlohmann::json report(const std::string& name = "report.json") {
        std::ifstream in(dir_ / name);
        return nlohmann::json::parse(in);
    }

    std::filesystem::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, RunWritesReports) {
    const auto cfg = small_reference();
    ASSERT_EQ(run({"run", "--config", cfg}), 0) << err_.str();
    for (const char* f : {"report.json", "summary.csv", "per_task_type.csv", "per_server.csv", "per_server_type.csv",
                          "queue_histogram.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(dir_ / f)) << f;
    }
    const auto doc = report();
    EXPECT_EQ(doc.at("policy"), "policies.simple_policy_ver3");
    EXPECT_EQ(doc.at("tasks_completed"), 2000);
    EXPECT_EQ(doc.at("effective_config").at("simulation").at("sched_policy_module"), "policies.simple_policy_ver3");
}

TEST_F(CliTest, PolicyAndSeedOverrides) {
    const auto cfg = small_reference();
    ASSERT_EQ(run({"run", "--config", cfg, "--policy", "v1", "--seed", "5"}), 0) << err_.str();
    const auto doc = report();
    EXPECT_EQ(doc.at("policy"), "v1");
    EXPECT_EQ(doc.at("seed"), 5);
    EXPECT_EQ(doc.at("effective_config").at("general").at("random_seed"), 5);
}

TEST_F(CliTest, SameSeedSameReport) {
    const auto cfg = small_reference();
    ASSERT_EQ(run({"run", "--config", cfg, "--seed", "3", "--out", (dir_ / "a").string()}), 0);
    ASSERT_EQ(run({"run", "--config", cfg, "--seed", "3", "--out", (dir_ / "b").string()}), 0);
    std::ifstream a(dir_ / "a" / "report.json"), b(dir_ / "b" / "report.json");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, BasenamePrefixesOutputs) {
    auto doc = nlohmann::json::parse(fixtures::kReferenceConfig);
    doc["simulation"]["max_tasks_simulated"] = 100;
    doc["general"]["basename"] = "soc_";
    const auto cfg = write_config(doc.dump());
    ASSERT_EQ(run({"run", "--config", cfg, "--out", dir_.string()}), 0) << err_.str();
    EXPECT_TRUE(std::filesystem::exists(dir_ / "soc_report.json"));
    EXPECT_TRUE(std::filesystem::exists(dir_ / "soc_queue_histogram.csv"));
}

TEST_F(CliTest, UnknownKeysWarnButRun) {
    auto doc = nlohmann::json::parse(fixtures::kReferenceConfig);
    doc["simulation"]["max_tasks_simulated"] = 100;
    doc["general"]["working_dir"] = dir_.string();
    doc["simulation"]["turbo"] = true;
    ASSERT_EQ(run({"run", "--config", write_config(doc.dump())}), 0);
    EXPECT_NE(err_.str().find("simulation.turbo: unknown key ignored"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"run"}), 1);
    EXPECT_EQ(run({"run", "--config", (dir_ / "missing.json").string()}), 1);
    EXPECT_EQ(run({"run", "--config", write_config("{not json")}), 1);
    EXPECT_NE(err_.str().find("configuration error"), std::string::npos);
    EXPECT_EQ(run({"run", "--config", small_reference(), "--policy", "v9"}), 1);
    EXPECT_EQ(run({"validate", "--utilizations", "0.5,1.2", "--tasks", "10"}), 1);
    EXPECT_EQ(run({"sweep", "--config", small_reference(), "--param", "colour", "--values", "1"}), 1);
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_NE(out_.str().find("validate"), std::string::npos);
}

TEST_F(CliTest, QueueOverflowIsRuntimeError) {
    auto doc = nlohmann::json::parse(fixtures::kReferenceConfig);
    doc["simulation"]["max_tasks_simulated"] = 5000;
    doc["simulation"]["max_queue_size"] = 1;
    doc["simulation"]["mean_arrival_time"] = 1;
    doc["general"]["working_dir"] = dir_.string();
    EXPECT_EQ(run({"run", "--config", write_config(doc.dump())}), 2);
}

TEST_F(CliTest, MissingTraceIsConfigError) {
    auto doc = nlohmann::json::parse(fixtures::kReferenceConfig);
    doc["general"]["input_trace_file"] = "nope.jsonl";
    doc["general"]["working_dir"] = dir_.string();
    EXPECT_EQ(run({"run", "--config", write_config(doc.dump())}), 1);
    EXPECT_NE(err_.str().find("trace error"), std::string::npos);
}

TEST_F(CliTest, ValidateWritesTable) {
    ASSERT_EQ(run({"validate", "--servers", "2", "--utilizations", "0.3,0.6", "--tasks", "20000", "--out",
                   dir_.string()}),
              0)
        << err_.str();
    std::ifstream in(dir_ / "mm2_validation.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_NE(out_.str().find("average relative error"), std::string::npos);
}

TEST_F(CliTest, SweepWritesTables) {
    const auto cfg = small_reference(500);
    ASSERT_EQ(run({"sweep", "--config", cfg, "--param", "mean_arrival_time", "--values", "50,100", "--policies",
                   "v1,v4"}),
              0)
        << err_.str();
    std::ifstream in(dir_ / "sweep.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 5);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "sweep_histogram.csv"));
    EXPECT_EQ(run({"sweep", "--config", cfg, "--param", "sched_policy_module", "--values", "v1,nope"}), 1);
}

TEST(CliFlags, EveryDocumentedFlagExists) {
    const auto flags = cli::flag_names();
    for (const char* f : {"run --config", "run --seed", "run --policy", "run --out", "validate --servers",
                          "validate --utilizations", "validate --tasks", "validate --seed", "validate --mean-service",
                          "validate --out", "sweep --config", "sweep --param", "sweep --values", "sweep --policies",
                          "sweep --seed", "sweep --out"}) {
        EXPECT_NE(std::find(flags.begin(), flags.end(), f), flags.end()) << f;
    }
}
