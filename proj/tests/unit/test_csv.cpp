#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pilinv/csv.hpp"
#include "pilinv/testbed.hpp"

using namespace pilinv;

TEST(Csv, Quoting) {
  EXPECT_EQ(csv_quote("plain"), "plain");
  EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_quote("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, Numbers) {
  EXPECT_EQ(csv_number(4.0), "4");
  EXPECT_EQ(csv_number(4.125), "4.125");
  EXPECT_EQ(csv_number(1.0 / 3.0), "0.333333");
  EXPECT_EQ(csv_number(-0.5, 2), "-0.5");
}

TEST(Csv, WriterLayout) {
  CsvWriter w({"a", "b"});
  w.row({"1", "x,y"});
  EXPECT_EQ(w.str(), "a,b\r\n1,\"x,y\"\r\n");
  EXPECT_THROW(w.row({"only one"}), std::exception);
}

TEST(Csv, SaveCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "pilinv_csv_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  CsvWriter w({"k"});
  w.row({"v"});
  w.save((dir / "out.csv").string());
  std::ifstream in(dir / "out.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "k\r\nv\r\n");
  std::filesystem::remove_all(dir.parent_path());
}

TEST(Testbed, InstanceCounts) {
  EXPECT_EQ(zipkin_instances().size(), 32u);
  EXPECT_EQ(large_instances().size(), 216u);
  EXPECT_EQ(leadtime_instances().size(), 120u);
  EXPECT_EQ(large_instances({0.5}, {2}, {9}).size(), 1u);
}

TEST(Testbed, GapSummaryEqualCosts) {
  std::vector<ResultRow> rows;
  for (const char* pol : {"pil", "bs", "cop"}) {
    ResultRow r;
    r.instance = large_instances({0.5}, {1}, {4}).front();
    r.policy = pol;
    r.cost = 123.0;
    rows.push_back(r);
  }
  for (const auto& g : gap_summary(rows)) {
    EXPECT_DOUBLE_EQ(g.avg_gap, 0.0);
    EXPECT_DOUBLE_EQ(g.max_gap, 0.0);
  }
}

TEST(Testbed, LeadtimeFilesAndByteStability) {
  const auto dir = std::filesystem::temp_directory_path() / "pilinv_tb_test";
  std::filesystem::remove_all(dir);
  TestbedOptions opts;
  opts.seed = 4;
  opts.cvs = {0.5};
  opts.taus = {1, 2};
  opts.ps = {4};
  SimConfig quick;
  quick.replications = 5;
  quick.periods = 1000;
  quick.warmup = 100;
  quick.ci_target = 0.0;
  opts.search = quick;
  quick.stream = 202;
  opts.final = quick;
  opts.out_dir = (dir / "a").string();
  TestbedReport a = run_testbed("leadtime", opts);
  opts.out_dir = (dir / "b").string();
  run_testbed("leadtime", opts);

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string ra = slurp(dir / "a" / "leadtime_results.csv");
  ASSERT_FALSE(ra.empty());
  EXPECT_EQ(ra, slurp(dir / "b" / "leadtime_results.csv"));
  const std::string lt = slurp(dir / "a" / "leadtime_cv0.5_p4.csv");
  EXPECT_EQ(lt.substr(0, lt.find('\r')), "tau,CBS,CPIL,COP");
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "leadtime_summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "leadtime_config.json"));
  for (const auto& r : a.rows) EXPECT_EQ(r.status, "ok") << r.policy << " " << r.note;
  std::filesystem::remove_all(dir);
}
