// Copyright 2026 The mktts Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "gtest/gtest.h"
#include "mktts/dsp/wav.hpp"
#include "mktts/stats/records.hpp"
#include "study_layout.hpp"
#include "signals.hpp"

#include <httplib.h>

extern char** environ;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const fs::path err_file = fs::temp_directory_path() / "mktts_cli_stderr.txt";
  const std::string cmd = std::string(MKTTS_CLI) + " " + args + " 2>" + err_file.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  r.err.assign(std::istreambuf_iterator<char>(in), {});
  return r;
}

int free_port() {
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  close(fd);
  return ntohs(addr.sin_port);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mktts_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, G2pText) {
  const auto r = run("g2p --text 'мама'");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "m 'a m a\n");
}

TEST_F(Cli, G2pFileAndAnnotated) {
  std::ofstream(p("in.txt")) << "Прв град.\nИмам 3 книги.\n";
  auto r = run("g2p --file " + p("in.txt"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "p @ 'r= v | g r 'a t\n'i m a m | k n 'i g i\n");
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  r = run("g2p --text 'Прв град.' --format annotated");
  EXPECT_EQ(r.out, "прв\tp @ 'r= v\tp @ 'r= v\t-\nград\tg r 'a t\tg r 'a t\tfinal\n||\n");
  EXPECT_EQ(run("g2p --text x --format xml").code, 1);
  EXPECT_EQ(run("g2p --file " + p("missing.txt")).code, 2);
}

TEST_F(Cli, UsageErrors) {
  auto r = run("frobnicate");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  r = run("g2p --text 'мама' --bogus");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"g2p", "select-corpus", "invert", "anchor", "stft-distance", "stats", "serve"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST_F(Cli, AnchorAndDistance) {
  using mktts::test::sine;
  const mktts::dsp::Signal<double> mix = sine(44100, 44100.0, 1000.0, 0.3) + sine(44100, 44100.0, 6000.0, 0.3);
  mktts::dsp::write_wav(p("a.wav"), {44100, mix});
  const auto r = run("anchor --cutoff 3500 --in " + p("a.wav") + " --out " + p("b.wav"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto b = mktts::dsp::read_wav(p("b.wav"));
  ASSERT_EQ(b.samples.size(), mix.size());
  // What is left should be the 1 kHz component.
  const auto lo = sine(44100, 44100.0, 1000.0, 0.3);
  const double resid = (b.samples - lo).segment(2000, 40000).matrix().norm() / lo.segment(2000, 40000).matrix().norm();
  EXPECT_LT(resid, 0.05);

  auto d = run("stft-distance --a " + p("a.wav") + " --b " + p("a.wav"));
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(d.out.substr(0, 16), "total: 0.000000\n");
  d = run("stft-distance --a " + p("a.wav") + " --b " + p("b.wav"));
  EXPECT_EQ(d.code, 0);
  EXPECT_GT(std::stod(d.out.substr(7)), 0.1);
  EXPECT_EQ(run("stft-distance --a " + p("a.wav")).code, 1);
}

TEST_F(Cli, AnalyzeThenInvert) {
  mktts::dsp::write_wav(p("x.wav"), {22050, mktts::test::chirp(22050, 22050.0, 200.0, 3000.0)});
  for (const char* ext : {".csv", ".mksg"}) {
    const std::string spec = p(std::string("x") + ext);
    ASSERT_EQ(run("analyze --in " + p("x.wav") + " --out " + spec).code, 0);
    const auto r = run("invert --mel " + spec + " --iters 10 --seed 3 --out " + p("y.wav"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("spectral_convergence: ", 0), 0u);
    const auto y = mktts::dsp::read_wav(p("y.wav"));
    EXPECT_EQ(y.sample_rate, 22050);
    EXPECT_EQ(y.samples.size(), 86 * 256);
    const auto again = run("invert --mel " + spec + " --iters 10 --seed 3 --out " + p("z.wav"));
    std::ifstream a(p("y.wav"), std::ios::binary), b(p("z.wav"), std::ios::binary);
    EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}),
              std::string(std::istreambuf_iterator<char>(b), {}));
  }
  EXPECT_EQ(run("invert --mel " + p("x.csv") + " --out " + p("y.wav")).code, 1);
  std::ofstream(p("bad.csv")) << "garbage\n";
  EXPECT_EQ(run("invert --mel " + p("bad.csv") + " --seed 1 --out " + p("y.wav")).code, 1);
}

TEST_F(Cli, SelectCorpus) {
  std::ofstream(p("pool.txt")) << "a\tмама оди дома.\nb\tпрв град оди брзо.\nc\tмама мама мама.\n";
  const auto r = run("select-corpus --input " + p("pool.txt") + " --count 2 --report " + p("rep.txt"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 2), "b\t");
  std::ifstream rep(p("rep.txt"));
  std::string first;
  std::getline(rep, first);
  EXPECT_EQ(first, "selected: 2");
  EXPECT_EQ(run("select-corpus --input " + p("pool.txt") + " --count 2 --min-words 10").code, 1);
}

TEST_F(Cli, Stats) {
  std::vector<mktts::stats::RatingRecord> recs;
  for (int l = 0; l < 4; ++l) {
    for (int u = 0; u < 5; ++u) {
      recs.push_back({"L" + std::to_string(l), "S", "u" + std::to_string(u), "sysA", "u", mktts::stats::Scale::Mos,
                      static_cast<double>(1 + (l + u) % 5)});
      recs.push_back({"L" + std::to_string(l), "S", "set" + std::to_string(u), "reference", "x",
                      mktts::stats::Scale::Mushra, l == 3 ? 40.0 : 100.0});
      recs.push_back({"L" + std::to_string(l), "S", "set" + std::to_string(u), "sysA", "y",
                      mktts::stats::Scale::Mushra, 60.0});
    }
  }
  mktts::stats::save_records(p("r.jsonl"), recs);
  mktts::stats::save_records(p("r.csv"), recs);
  auto r = run("stats mos --in " + p("r.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sysA  | 3.00 | 0.64"), std::string::npos) << r.out;
  EXPECT_EQ(run("stats mos --in " + p("r.csv")).out, r.out);
  r = run("stats mushra --in " + p("r.csv") + " --boxplot " + p("box.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("excluded L3"), std::string::npos);
  EXPECT_TRUE(fs::exists(p("box.csv")));
  const auto unscreened = run("stats mushra --in " + p("r.csv") + " --no-screen");
  EXPECT_NE(unscreened.out, r.out);
  EXPECT_EQ(run("stats --in " + p("r.csv")).code, 1);
  EXPECT_EQ(run("stats mos --in " + p("nope.jsonl")).code, 2);
}

TEST_F(Cli, ServeLoadsDefinitions) {
  auto def = mktts::test::write_study_layout(dir_ / "stimuli", 2000);
  for (auto& m : def["mos"]) m["wav"] = "stimuli/" + m["wav"].get<std::string>();
  for (auto& pg : def["mushra"]) {
    pg["reference"] = "stimuli/" + pg["reference"].get<std::string>();
    for (auto& s : pg["stimuli"]) s["wav"] = "stimuli/" + s["wav"].get<std::string>();
  }
  std::ofstream(p("study.json")) << def.dump(1);

  const int port = free_port();
  const std::string port_s = std::to_string(port);
  const std::string dir_s = dir_.string();
  const char* argv[] = {MKTTS_CLI, "serve", "--test-dir", dir_s.c_str(), "--port", port_s.c_str(), nullptr};
  pid_t pid;
  ASSERT_EQ(posix_spawn(&pid, MKTTS_CLI, nullptr, nullptr, const_cast<char**>(argv), environ), 0);

  httplib::Client client("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 100 && !(res = client.Post("/tests/study/sessions", "{}", "application/json")); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  EXPECT_TRUE(fs::exists(dir_ / "tests" / "study" / "test.json"));
}

}  // namespace
