/*
 * Copyright 2026 The colstore Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"

namespace {

using testing_util = colstore::testing_util::TempDir;

struct Result {
  int status = 0;
  std::string out;
  std::string err;
};

Result run(const std::string& args, const testing_util& dir) {
  const auto err_path = dir.file("stderr.txt");
  const auto cmd = std::string(COLSTORE_CLI) + " " + args + " 2>" + err_path;
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}, "popen failed"};
  std::array<char, 4096> buf;
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const auto status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream err(err_path);
  r.err.assign(std::istreambuf_iterator<char>(err), {});
  return r;
}

std::map<std::string, std::string> metrics(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.find(' ') != std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing_util();
    ASSERT_EQ(run("generate cms-like --scale 0.002 -o " + dir_->file("cms.cs"), *dir_).status, 0);
    ASSERT_EQ(run("generate lhcb-like --scale 0.001 -o " + dir_->file("lhcb.cs"), *dir_).status, 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static testing_util* dir_;
};

testing_util* Cli::dir_ = nullptr;

TEST_F(Cli, InspectReportsShapeAndByteTotalsSumToFileSize) {
  const auto r = run("inspect --format json " + dir_->file("lhcb.cs"), *dir_);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["top_level_fields"], 26);
  EXPECT_EQ(j["entries"], 8500);
  const auto& b = j["bytes"];
  const std::uint64_t sum = b["host_prefix"].get<std::uint64_t>() + b["envelope"].get<std::uint64_t>() +
                            b["header"].get<std::uint64_t>() + b["footer"].get<std::uint64_t>() +
                            b["pages"].get<std::uint64_t>() + b["slack"].get<std::uint64_t>();
  EXPECT_EQ(sum, std::filesystem::file_size(dir_->file("lhcb.cs")));
  EXPECT_EQ(b["total"].get<std::uint64_t>(), sum);
  std::uint64_t column_bytes = 0;
  for (const auto& c : j["columns"]) column_bytes += c["compressed_bytes"].get<std::uint64_t>();
  EXPECT_EQ(column_bytes, b["pages"].get<std::uint64_t>());

  const auto cms = nlohmann::json::parse(run("inspect --format json " + dir_->file("cms.cs"), *dir_).out);
  EXPECT_EQ(cms["top_level_fields"], 1479);
  EXPECT_EQ(cms["entries"], 3200);
}

TEST_F(Cli, InspectTextAndEmptyDataset) {
  const auto text = run("inspect " + dir_->file("lhcb.cs"), *dir_);
  ASSERT_EQ(text.status, 0);
  EXPECT_NE(text.out.find("26 top-level"), std::string::npos);
  EXPECT_NE(text.out.find("H1_PX : float64"), std::string::npos);

  // an import of no lines gives an empty dataset
  std::ofstream(dir_->file("empty.txt")).close();
  ASSERT_EQ(run("import " + dir_->file("empty.txt") + " --schema-from " + dir_->file("lhcb.cs") + " -o " +
                    dir_->file("empty.cs"),
                *dir_)
                .status,
            0);
  const auto j = nlohmann::json::parse(run("inspect --format json " + dir_->file("empty.cs"), *dir_).out);
  EXPECT_EQ(j["clusters"].size(), 0u);
  EXPECT_EQ(j["bytes"]["pages"], 0);
  EXPECT_EQ(j["bytes"]["envelope"].get<std::uint64_t>() + j["bytes"]["header"].get<std::uint64_t>() +
                j["bytes"]["footer"].get<std::uint64_t>(),
            j["bytes"]["total"].get<std::uint64_t>());
}

TEST_F(Cli, BenchSparseReadAndStreamInvariance) {
  const std::string cols = "--columns nMuon,Muon_pt,Muon_eta,Muon_phi,Muon_mass,Muon_charge";
  const auto one = run("bench " + dir_->file("cms.cs") + " " + cols + " --streams 1 --format metrics", *dir_);
  ASSERT_EQ(one.status, 0) << one.err;
  const auto m1 = metrics(one.out);
  EXPECT_LT(std::stod(m1.at("bytes_read")), 0.05 * std::stod(m1.at("total_bytes")));
  for (const auto* key : {"entries_per_second", "requests", "wall_seconds", "checksum"}) EXPECT_TRUE(m1.count(key)) << key;

  const auto sixteen = metrics(run("bench " + dir_->file("cms.cs") + " " + cols + " --streams 16 --format metrics", *dir_).out);
  EXPECT_EQ(sixteen.at("checksum"), m1.at("checksum"));

  const auto gap0 = metrics(run("bench " + dir_->file("cms.cs") + " --gap-threshold 0 --format metrics", *dir_).out);
  const auto gap16 = metrics(run("bench " + dir_->file("cms.cs") + " --gap-threshold 16384 --format metrics", *dir_).out);
  EXPECT_LE(std::stoull(gap16.at("requests")), std::stoull(gap0.at("requests")));
  EXPECT_EQ(gap0.at("checksum"), gap16.at("checksum"));
}

TEST_F(Cli, BenchRepetitionsReportAndReadOnly) {
  const auto before = slurp(dir_->file("lhcb.cs"));
  const auto report = dir_->file("report.json");
  const auto r = run("bench " + dir_->file("lhcb.cs") + " --warm --repetitions 3 --report " + report, *dir_);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(report));
  ASSERT_EQ(j["repetitions"].size(), 3u);
  EXPECT_GT(j["repetitions"][0]["bytes_read"].get<std::uint64_t>(), 0u);
  EXPECT_EQ(j["repetitions"][1]["requests"], 0);  // warm: pages already resident
  EXPECT_EQ(slurp(dir_->file("lhcb.cs")), before);
}

TEST_F(Cli, ErrorsCarryClassPrefix) {
  auto r = run("bench " + dir_->file("cms.cs") + " --columns nope", *dir_);
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(r.err.rfind("error[lookup]: ", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = run("inspect " + dir_->file("missing.cs"), *dir_);
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(r.err.rfind("error[io]: ", 0), 0u) << r.err;

  std::ofstream(dir_->file("junk.cs")) << std::string(200, 'x');
  r = run("inspect " + dir_->file("junk.cs"), *dir_);
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(r.err.rfind("error[format]: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("offset"), std::string::npos) << r.err;

  r = run("generate lhcb-like -o " + dir_->file("lhcb.cs"), *dir_);
  EXPECT_EQ(r.err.rfind("error[usage]: ", 0), 0u) << r.err;

  r = run("generate lhcb-like --codec brotli -o " + dir_->file("x.cs"), *dir_);
  EXPECT_EQ(r.err.rfind("error[config]: ", 0), 0u) << r.err;

  r = run("frobnicate", *dir_);
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(r.err.rfind("error[config]: ", 0), 0u) << r.err;
}

TEST_F(Cli, ExportImportExportFixedPointAndSubset) {
  const auto a = dir_->file("a.txt");
  ASSERT_EQ(run("export " + dir_->file("lhcb.cs") + " -o " + a, *dir_).status, 0);
  ASSERT_EQ(run("import " + a + " --schema-from " + dir_->file("lhcb.cs") + " --codec lz4 -o " + dir_->file("re.cs"), *dir_)
                .status,
            0);
  const auto b = run("export " + dir_->file("re.cs"), *dir_);
  EXPECT_EQ(b.out, slurp(a));
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 8500);

  const auto subset = run("export " + dir_->file("lhcb.cs") + " --columns H2_isMuon", *dir_).out;
  EXPECT_EQ(subset.substr(0, subset.find(':')), "{\"H2_isMuon\"");
  EXPECT_EQ(subset.find(','), std::string::npos);
}

TEST_F(Cli, MergeValidateAndEmbeddedRegion) {
  const auto merged = dir_->file("merged.cs");
  ASSERT_EQ(run("merge " + dir_->file("lhcb.cs") + " " + dir_->file("lhcb.cs") + " -o " + merged, *dir_).status, 0);
  const auto v = run("validate " + merged, *dir_);
  EXPECT_EQ(v.status, 0) << v.err;
  EXPECT_NE(v.out.find("status=ok"), std::string::npos);
  const auto j = nlohmann::json::parse(run("inspect --format json " + merged, *dir_).out);
  EXPECT_EQ(j["entries"], 17000);

  const auto host = dir_->file("host.bin");
  ASSERT_EQ(run("generate h1-like --scale 0.0005 --region-offset 4096 -o " + host, *dir_).status, 0);
  const auto e = nlohmann::json::parse(run("inspect --format json --region-offset 4096 " + host, *dir_).out);
  EXPECT_EQ(e["top_level_fields"], 152);
  EXPECT_EQ(e["bytes"]["host_prefix"], 4096);
  EXPECT_EQ(e["bytes"]["total"].get<std::uint64_t>(), std::filesystem::file_size(host));
  EXPECT_NE(run("inspect " + host, *dir_).status, 0);
}

TEST_F(Cli, GenerateIsDeterministic) {
  ASSERT_EQ(run("generate h1-like --scale 0.0005 --seed 9 -o " + dir_->file("g1.cs"), *dir_).status, 0);
  ASSERT_EQ(run("generate h1-like --scale 0.0005 --seed 9 -o " + dir_->file("g2.cs"), *dir_).status, 0);
  EXPECT_EQ(slurp(dir_->file("g1.cs")), slurp(dir_->file("g2.cs")));
}

}  // namespace
