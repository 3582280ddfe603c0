// Copyright 2026 The wavehum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "wavehum_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

const char* small_config =
    "geometry.Nr = 6\n"
    "geometry.Ntheta = 12\n"
    "horizon.T = 2\n"
    "horizon.dt = 0.01\n"
    "horizon.eps0 = 0.4\n"
    "hum.cg_tol = 1e-3\n"
    "observability.Nr = 5\n"
    "observability.Ntheta = 8\n"
    "observability.T_values = 0.5,2\n"
    "observability.n_samples = 3\n"
    "noise.Nr = 5\n"
    "noise.Ntheta = 8\n"
    "noise.n_modes = 5\n";

int run(const std::string& args) {
  const std::string cmd = std::string(WAVEHUM_CLI) + " " + args + " > " +
                          (workdir() / "stdout.txt").string() + " 2> " +
                          (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, MalformedConfigExitsWithTwo) {
  const fs::path cfg = write_config("bad.cfg", "geometry.r0 = 0.5\ngeometry.r1 = 0.25\n");
  EXPECT_EQ(run("--config " + cfg.string() + " simulate"), 2);
  const std::string err = slurp(workdir() / "stderr.txt");
  EXPECT_NE(err.find("line 2"), std::string::npos) << err;
  EXPECT_NE(err.find("geometry.r1"), std::string::npos) << err;
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("--config " + (workdir() / "missing.cfg").string() + " simulate"), 2);
  EXPECT_EQ(run("nosuchcommand"), 2);
  EXPECT_EQ(run(""), 2);
  const fs::path cfg = write_config("few.cfg", std::string(small_config) + "noise.n_paths = 10\n");
  EXPECT_EQ(run("--quiet --config " + cfg.string() + " --out " + (workdir() / "m").string() + " mixing"), 2);
}

TEST(Cli, SimulateIsReproducible) {
  const fs::path cfg = write_config("small.cfg", small_config);
  const fs::path a = workdir() / "a", b = workdir() / "b";
  ASSERT_EQ(run("--quiet --config " + cfg.string() + " --out " + a.string() + " simulate"), 0);
  ASSERT_EQ(run("--quiet --config " + cfg.string() + " --out " + b.string() + " simulate"), 0);
  const std::string ledger = slurp(a / "ledger.csv");
  EXPECT_EQ(ledger.substr(0, ledger.find('\n')), "t,E,dissipated,work_in,residual,hooke");
  EXPECT_EQ(ledger, slurp(b / "ledger.csv"));
  EXPECT_EQ(ledger.find('\r'), std::string::npos);
  const std::string report = slurp(a / "simulate_report.txt");
  EXPECT_EQ(report, slurp(b / "simulate_report.txt"));
  EXPECT_NE(report.find("geometry.Nr = 6"), std::string::npos);
  EXPECT_NE(report.find("simulate.status = ok"), std::string::npos);
}

TEST(Cli, ChecksPassOnSmallConfig) {
  const fs::path cfg = write_config("small.cfg", small_config);
  EXPECT_EQ(run("--config " + cfg.string() + " --out " + (workdir() / "c").string() + " checks"), 0);
  EXPECT_NE(slurp(workdir() / "stdout.txt").find("checks.status = ok"), std::string::npos);
}

TEST(Cli, HumReportsSignAndSeedOverride) {
  const fs::path cfg = write_config("small.cfg", small_config);
  const fs::path out = workdir() / "h";
  ASSERT_EQ(run("--quiet --seed 99 --config " + cfg.string() + " --out " + out.string() + " hum"), 0);
  const std::string report = slurp(out / "hum_report.txt");
  EXPECT_NE(report.find("hum.sign = -1"), std::string::npos) << report;
  EXPECT_NE(report.find("noise.seed = 99"), std::string::npos);
  EXPECT_NE(report.find("hum.sign_source = validated"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "control.csv"));
}

TEST(Cli, RemainingSubcommandsWriteOutputs) {
  const fs::path cfg = write_config("small.cfg", small_config);
  const fs::path out = workdir() / "r";
  EXPECT_EQ(run("--quiet --config " + cfg.string() + " --out " + out.string() + " adjoint"), 0);
  EXPECT_EQ(run("--quiet --config " + cfg.string() + " --out " + out.string() + " lyapunov"), 0);
  EXPECT_EQ(run("--quiet --config " + cfg.string() + " --out " + out.string() + " observability"), 0);
  EXPECT_TRUE(fs::exists(out / "observation.csv"));
  EXPECT_TRUE(fs::exists(out / "lyapunov.csv"));
  EXPECT_TRUE(fs::exists(out / "observability.csv"));
}
