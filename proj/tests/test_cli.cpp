#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome run(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "retroimg_cli_log.txt";
  const std::string cmd = std::string(RETROIMG_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("run writes conditional.csv") {
  const fs::path out = fs::temp_directory_path() / "retroimg_cli_run";
  fs::remove_all(out);
  const auto cfg = write_config("retroimg_cli_ok.cfg", "grid.n = 256\ndetector.sigma = 0.25\noutput.stages = true\n");
  const auto r = run("run --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "conditional.csv"));
  CHECK(fs::exists(out / "stages.json"));
  fs::remove_all(out);
}

TEST_CASE("exit codes") {
  CHECK(run("run --config " + write_config("retroimg_cli_bad.cfg", "grid.n = 500\n").string()).code == 1);
  CHECK(run("run --config /nonexistent.cfg").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("run").code == 1);
  const auto dark = write_config("retroimg_cli_dark.cfg",
                                 "scenario = custom\narm1 = mask\nmask = single-slit\nmask.width = 0.4\n"
                                 "detector.shape = point\ndetector.x1 = 3\nedge_guard = 0\n");
  const auto r = run("run --config " + dark.string() + " --out " + (fs::temp_directory_path() / "retroimg_dark").string());
  CHECK(r.code == 2);
  CHECK(r.out.find("dark conditional") != std::string::npos);
}

TEST_CASE("scenarios and verify") {
  const auto s = run("scenarios");
  CHECK(s.code == 0);
  CHECK(s.out.find("fourier-2f-single-slit") != std::string::npos);
  const auto v = run("verify --fast");
  CHECK(v.code == 0);
  CHECK(v.out.find("verification passed") != std::string::npos);
}
