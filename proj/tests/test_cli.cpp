#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

int counter = 0;

struct Workspace {
  fs::path dir;
  Workspace() : dir(fs::temp_directory_path() / ("pfnl_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++))) {
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path config(const std::string& body) const {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << "output.dir = " << (dir / "out").string() << "\n" << body;
    return p;
  }

  int pfnl(const std::string& args) const {
    const std::string cmd = std::string(PFNL_CLI_PATH) + " " + args + " > " + (dir / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("verify-kernel succeeds and writes the constants") {
  Workspace w;
  CHECK(w.pfnl("verify-kernel --config " + w.config("").string()) == 0);
  const std::string csv = slurp(w.dir / "out" / "kernel.csv");
  CHECK(csv.find("c_d") != std::string::npos);
  CHECK(fs::exists(w.dir / "out" / "manifest.json"));
}

TEST_CASE("unresolved eps exits with status 2") {
  Workspace w;
  const auto cfg = w.config("grid.n = 64\ntime.T = 0.01\ntime.dt = 0.01\n");
  CHECK(w.pfnl("simulate --config " + cfg.string() + " --eps 0.01") == 2);
  CHECK(slurp(w.dir / "log.txt").find("eps") != std::string::npos);
}

TEST_CASE("invalid configuration exits with status 2") {
  Workspace w;
  CHECK(w.pfnl("simulate --config " + w.config("kernel.alpha = 0.5\n").string()) == 2);
  CHECK(w.pfnl("simulate --config " + w.config("no.such = 1\n").string()) == 2);
  CHECK(w.pfnl("simulate") == 2);
}

TEST_CASE("simulate then energy-report") {
  Workspace w;
  const auto cfg = w.config("grid.n = 64\ntime.T = 0.05\ntime.dt = 0.01\ntime.snapshots = 2\n");
  REQUIRE(w.pfnl("simulate --config " + cfg.string()) == 0);
  CHECK(fs::exists(w.dir / "out" / "energy.csv"));
  CHECK(fs::exists(w.dir / "out" / "snapshots" / "times.csv"));
  CHECK(w.pfnl("simulate --config " + cfg.string() + " --local") == 0);
  CHECK(w.pfnl("energy-report --config " + cfg.string() + " --run " + (w.dir / "out").string()) == 0);
  CHECK(fs::exists(w.dir / "out" / "energy_report.csv"));
}

}
