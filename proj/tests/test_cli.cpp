#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "navseed/expert.hpp"
#include "navseed/maps.hpp"

using namespace navseed;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(NAVSEED_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

double sidecar_value(const std::string& path, const std::string& key) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string line;
  while (std::getline(f, line)) {
    auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    if (line.substr(0, eq) == key) return std::stod(line.substr(eq + 3));
  }
  FAIL("key not found in sidecar: " << key);
  return 0.0;
}

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("navseed_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    // a small dataset all subcommands can share
    sim::WorldMap map = sim::load_embedded_map("corridor");
    expert::ExpertConfig xc;
    expert::build_dataset_to_file(map, 4, sim::EpisodeConfig{}, sim::RewardParams{}, xc, 3,
                                  (dir / "d.bin").string(), 2);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("cli: defaults resolve the paper learning rate") {
  Sandbox sb;
  int rc = run_cli("pretrain --data " + sb.p("d.bin") + " --steps 3 --batch 4 --out " +
                   sb.p("m.bin"));
  REQUIRE(rc == 0);
  CHECK(sidecar_value(sb.p("m.bin") + ".config", "lr") == doctest::Approx(3e-6));
  CHECK(sidecar_value(sb.p("m.bin") + ".config", "batch") == 4);
}

TEST_CASE("cli: precedence is defaults < config file < flags") {
  Sandbox sb;
  {
    std::ofstream f(sb.p("run.cfg"));
    f << "# test config\n";
    f << "lr = 1e-4\n";
    f << "gamma = 0.9\n";
  }
  // config file only: lr from file
  int rc = run_cli("pretrain --data " + sb.p("d.bin") + " --steps 3 --batch 4 --config " +
                   sb.p("run.cfg") + " --out " + sb.p("m1.bin"));
  REQUIRE(rc == 0);
  CHECK(sidecar_value(sb.p("m1.bin") + ".config", "lr") == doctest::Approx(1e-4));
  CHECK(sidecar_value(sb.p("m1.bin") + ".config", "gamma") == doctest::Approx(0.9));

  // flag beats the file
  rc = run_cli("pretrain --data " + sb.p("d.bin") + " --steps 3 --batch 4 --config " +
               sb.p("run.cfg") + " --lr 3e-4 --out " + sb.p("m2.bin"));
  REQUIRE(rc == 0);
  CHECK(sidecar_value(sb.p("m2.bin") + ".config", "lr") == doctest::Approx(3e-4));
}

TEST_CASE("cli: unknown config keys are rejected") {
  Sandbox sb;
  {
    std::ofstream f(sb.p("bad.cfg"));
    f << "no_such_key = 5\n";
  }
  int rc = run_cli("pretrain --data " + sb.p("d.bin") + " --steps 3 --batch 4 --config " +
                   sb.p("bad.cfg") + " --out " + sb.p("m.bin"));
  CHECK(rc == 2);
}

TEST_CASE("cli: usage errors exit 2, runtime failures exit 1") {
  Sandbox sb;
  CHECK(run_cli("pretrain --data " + sb.p("d.bin") + " --batch -5 --steps 3 --out " +
                sb.p("m.bin")) == 2);
  CHECK(run_cli("pretrain --data " + sb.p("d.bin") + " --no-such-flag 1 --out " + sb.p("m.bin")) ==
        2);
  CHECK(run_cli("pretrain --data " + sb.p("missing.bin") + " --steps 3 --out " + sb.p("m.bin")) ==
        1);
  // loading a ddpg model into a sac trainer is an architecture mismatch
  REQUIRE(run_cli("pretrain --data " + sb.p("d.bin") + " --algo ddpg --steps 3 --batch 4 --out " +
                  sb.p("mddpg.bin")) == 0);
  CHECK(run_cli("train --mode pretrain_per --algo sac --map corridor --init " + sb.p("mddpg.bin") +
                " --expert-data " + sb.p("d.bin") + " --env-steps 3 --batch 4 --out " +
                sb.p("out.bin")) == 1);
}

TEST_CASE("cli: rerunning from the sidecar reproduces the artifact") {
  Sandbox sb;
  int rc = run_cli("pretrain --data " + sb.p("d.bin") + " --steps 5 --batch 8 --lr 2e-4 --seed 9" +
                   " --out " + sb.p("m1.bin"));
  REQUIRE(rc == 0);
  // the sidecar pins data/out too; override out to a fresh path
  rc = run_cli("pretrain --config " + sb.p("m1.bin.config") + " --out " + sb.p("m3.bin"));
  REQUIRE(rc == 0);
  CHECK(slurp(sb.p("m1.bin")) == slurp(sb.p("m3.bin")));
}

TEST_CASE("cli: artifact generation is idempotent for a fixed config") {
  Sandbox sb;
  std::string args = "gen-data --map corridor --episodes 3 --seed 21 --workers 2 --out ";
  REQUIRE(run_cli(args + sb.p("a.bin")) == 0);
  REQUIRE(run_cli(args + sb.p("b.bin")) == 0);
  CHECK(slurp(sb.p("a.bin")) == slurp(sb.p("b.bin")));
}
