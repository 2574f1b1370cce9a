#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "nulldist/scenario.hpp"

using namespace nulldist;

int main(int argc, char** argv) {
  CLI::App app{"Null distance experiments on Lorentzian model spacetimes"};
  app.require_subcommand(1);
  std::string config_path;
  bool check = false;
  int threads = 0;
  std::string out;

  for (const char* name : {"estimate", "encode", "witness", "probe", "catalog-list"}) {
    CLI::App* sub = app.add_subcommand(name);
    if (std::string(name) != "catalog-list")
      sub->add_option("--config", config_path, "scenario config file")->required();
    sub->add_flag("--check", check, "exit 4 when a property check fails");
    sub->add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "report prefix");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    ScenarioOverrides ov;
    ov.check = check;
    if (threads > 0) ov.threads = threads;
    if (!out.empty()) ov.out = out;
    if (const char* s = std::getenv("NULLDIST_SEED")) ov.seed = parse_u64(s);
    ConfigFile file = config_path.empty() ? ConfigFile{} : ConfigFile::load(config_path);
    return run_scenario(make_scenario(command, std::move(file), ov), std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}
