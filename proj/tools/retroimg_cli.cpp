// Command-line front end; talks to the simulator only through the C API.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "retroimg/retroimg.h"

namespace {

int exit_code(rti_status s) {
  switch (s) {
    case RTI_OK:
      return 0;
    case RTI_ERR_DARK:
      return 2;
    case RTI_ERR_VERIFICATION:
      return 3;
    default:
      return 1;
  }
}

int report(rti_status s) {
  if (s != RTI_OK) {
    const char* kind = s == RTI_ERR_DARK ? "dark conditional" : s == RTI_ERR_IO ? "i/o error" : "error";
    std::cerr << "retroimg: " << kind << ": " << rti_last_error() << '\n';
  }
  return exit_code(s);
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  rti_config* cfg = nullptr;
  if (auto s = rti_config_load(config_path.c_str(), &cfg); s != RTI_OK) return report(s);
  rti_result* res = nullptr;
  auto s = rti_run(cfg, &res);
  if (s == RTI_OK) {
    const char* dir = out_dir.empty() ? nullptr : out_dir.c_str();
    s = rti_result_write(res, dir);
    if (s == RTI_OK) {
      const char* cfg_dir = nullptr;
      rti_config_output_dir(cfg, &cfg_dir);
      std::cout << "wrote " << rti_result_count(res) << " conditional(s) to "
                << (dir ? dir : cfg_dir) << '\n';
    }
  }
  rti_result_free(res);
  rti_config_free(cfg);
  return report(s);
}

int cmd_verify(bool fast) {
  char* text = nullptr;
  double seconds = 0.0;
  const auto s = rti_verify(fast ? 1 : 0, &text, &seconds);
  if (text) {
    std::cout << text;
    rti_string_free(text);
  }
  if (s == RTI_OK || s == RTI_ERR_VERIFICATION) {
    std::fprintf(stderr, "elapsed %.2f s\n", seconds);
    return exit_code(s);
  }
  return report(s);
}

int cmd_scenarios(bool show_config) {
  for (std::size_t i = 0; i < rti_scenario_count(); ++i) {
    const char* name = nullptr;
    const char* description = nullptr;
    const char* config = nullptr;
    rti_scenario_info(i, &name, &description, &config);
    std::cout << name << "  " << description << '\n';
    if (show_config) std::cout << config << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon imaging: conditional detection density P(x2 | x1)"};
  app.set_version_flag("--version", std::string(rti_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run a scenario config and write conditional.csv");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory (default: output.dir from the config)");

  bool fast = false;
  auto* verify = app.add_subcommand("verify", "compare retrodictive and predictive pipelines");
  verify->add_flag("--fast", fast, "smaller grids");

  bool show_config = false;
  auto* scenarios = app.add_subcommand("scenarios", "list built-in scenarios");
  scenarios->add_flag("--config", show_config, "print each scenario's config text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run) return cmd_run(config_path, out_dir);
  if (*verify) return cmd_verify(fast);
  return cmd_scenarios(show_config);
}
