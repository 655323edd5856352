#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace mimply;

namespace {

struct CmdResult {
  int code;
  std::string out;
};

const std::string kCli = std::string("'") + MIMPLY_CLI_PATH + "'";

// Runs a shell command and captures stdout and stderr together.
CmdResult shell(const std::string& cmd) {
  std::string full = "{ " + cmd + "; } 2>&1";
  FILE* p = popen(full.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

CmdResult mimply_cli(const std::string& args) { return shell(kCli + " " + args); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mimply_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, Parse) {
  CmdResult r = mimply_cli("parse -f '((A -> B) -> (C))'");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(A -> B) -> C\n");
  r = mimply_cli("parse -f 'A -> -> B'");
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.out.find("token 2"), std::string::npos) << r.out;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(mimply_cli("").code, 64);
  EXPECT_EQ(mimply_cli("frobnicate").code, 64);
  EXPECT_EQ(mimply_cli("parse").code, 64);
  EXPECT_EQ(mimply_cli("gen-fib -n x").code, 64);
  EXPECT_EQ(mimply_cli("gen-fib -n 1 -o " + at("f.json")).code, 64);
  EXPECT_EQ(mimply_cli("compress " + at("missing.json")).code, 64);
  EXPECT_EQ(mimply_cli("--help").code, 0);
}

TEST_F(Cli, ProveCompressVerifyPipeline) {
  CmdResult r = shell(kCli + " prove -f 'A -> A' | " + kCli + " compress - -o - | " + kCli + " verify -");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ratio: 1.00"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("CORRECT TAUTOLOGY"), std::string::npos) << r.out;
}

TEST_F(Cli, ProveFailsOnPeirce) {
  CmdResult r = mimply_cli("prove -f '((A -> B) -> A) -> A' -o " + at("p.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(path("p.json")));
  EXPECT_EQ(mimply_cli("prove -f 'A -> B -> A' --max-depth 1 -o " + at("p.json")).code, 1);
  EXPECT_EQ(mimply_cli("prove -f 'A -> B -> A' --max-depth 2 -o " + at("p.json")).code, 0);
}

TEST_F(Cli, CheckNd) {
  spit(path("transitivity.json"), to_json(fixtures::transitivity()));
  CmdResult r = mimply_cli("check-nd " + at("transitivity.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("open assumptions: {A -> B, B -> C}"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("normal: yes"), std::string::npos);

  Derivation bad = fixtures::transitivity();
  bad.nodes[0].dep = Bitstring::from_string("100101");
  spit(path("bad.json"), to_json(bad));
  r = mimply_cli("check-nd " + at("bad.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("dependency error"), std::string::npos) << r.out;

  spit(path("junk.json"), "{\"order\": 3}");
  EXPECT_EQ(mimply_cli("check-nd " + at("junk.json")).code, 64);
}

TEST_F(Cli, GenFibCompressReportsTheTreeSize) {
  ASSERT_EQ(mimply_cli("gen-fib -n 12 -o " + at("fib.json")).code, 0);
  CmdResult r = mimply_cli("compress " + at("fib.json") + " -o " + at("dag.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("tree size: 751\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("dag size: 34\n"), std::string::npos) << r.out;

  r = mimply_cli("verify --steps " + at("dag.json"));
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("CORRECT DERIVATION"), std::string::npos);
  EXPECT_NE(r.out.find("steps: "), std::string::npos);
  EXPECT_NE(r.out.find("bound: "), std::string::npos);

  ASSERT_EQ(mimply_cli("gen-fib -n 12 --closed -o " + at("closed.json")).code, 0);
  ASSERT_EQ(mimply_cli("compress " + at("closed.json") + " -o " + at("closed_dag.json")).code, 0);
  EXPECT_EQ(mimply_cli("verify " + at("closed_dag.json")).code, 0);
  // Several files: the worst verdict decides the exit code.
  EXPECT_EQ(mimply_cli("verify " + at("closed_dag.json") + " " + at("dag.json")).code, 1);

  r = mimply_cli("stats " + at("fib.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("nodes: 751"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("lri groups: "), std::string::npos);
}

TEST_F(Cli, FlippedBitIsRejected) {
  RDagProof c = compress(fib_family_closed(8).derivation);
  for (auto& e : c.d_edges) {
    if (e.bits && e.to != c.root) {
      if (e.bits->test(0)) e.bits->reset(0); else e.bits->set(0);
      break;
    }
  }
  spit(path("dag.json"), to_json(c));
  CmdResult r = mimply_cli("verify " + at("dag.json"));
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_TRUE(r.out.find("reason: LabelMismatch") != std::string::npos ||
              r.out.find("reason: Structural") != std::string::npos)
      << r.out;

  spit(path("label.json"), to_json(fixtures::add_bit_along_path(from_derivation(fixtures::transitivity()), 3, 1)));
  r = mimply_cli("verify " + at("label.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("reason: LabelMismatch\n"), std::string::npos) << r.out;

  RDagProof t = from_derivation(fixtures::transitivity());
  t.a_edges.push_back(AEdge{3, 3, 1});
  spit(path("loop.json"), to_json(t));
  r = mimply_cli("verify " + at("loop.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("reason: Structural ("), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("EA-irreflexivity"), std::string::npos) << r.out;

  spit(path("junk.json"), "[]");
  EXPECT_EQ(mimply_cli("verify " + at("junk.json") + " " + at("loop.json")).code, 64);
}

TEST_F(Cli, OutputFilesAreStable) {
  ASSERT_EQ(mimply_cli("prove -f '(A -> B) -> (B -> A -> B)' -o " + at("p.json")).code, 0);
  ASSERT_EQ(mimply_cli("compress " + at("p.json") + " -o " + at("d.json")).code, 0);
  std::string p = slurp(path("p.json")), d = slurp(path("d.json"));
  EXPECT_EQ(to_json(derivation_from_json(p)), p);
  EXPECT_EQ(to_json(rdag_from_json(d)), d);
  ASSERT_EQ(mimply_cli("compress " + at("p.json") + " -o " + at("d2.json")).code, 0);
  EXPECT_EQ(slurp(path("d2.json")), d);
}

TEST_F(Cli, CompressFlags) {
  ASSERT_EQ(mimply_cli("gen-fib -n 8 -o " + at("fib.json")).code, 0);
  CmdResult r = mimply_cli("compress " + at("fib.json") + " -o " + at("d.json") + " --min-size 1000");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ratio: 1.00"), std::string::npos) << r.out;
  EXPECT_EQ(mimply_cli("compress " + at("fib.json") + " -o " + at("d.json") + " --min-count 1").code, 64);
}
