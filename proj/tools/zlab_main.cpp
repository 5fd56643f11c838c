#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "zlab/zlab.h"

int main(int argc, char** argv) {
  CLI::App app{"zlab: experiments on singular sets, Orlicz spaces and sparse bounds"};
  app.set_version_flag("--version", std::string(zlab_version()));
  app.require_subcommand(1);

  std::string config;
  std::string out = "zlab_out";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string selected;

  for (std::size_t i = 0; i < zlab_command_count(); ++i) {
    const std::string name = zlab_command_name(i);
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--seed", seed, "seed for stochastic experiments (overrides the config)");
    sub->add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->callback([&selected, name] { selected = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  bool has_seed = false;
  for (CLI::App* sub : app.get_subcommands())
    if (sub->count("--seed")) has_seed = true;

  std::vector<char> diag(8192, '\0');
  const int code = zlab_run(selected.c_str(), config.c_str(), out.c_str(), has_seed ? 1 : 0, seed, threads,
                            diag.data(), diag.size());
  if (code != 0) {
    std::cerr << "zlab " << selected << ": " << diag.data() << "\n";
  } else {
    std::cerr << "zlab " << selected << ": reports written to " << out << "\n";
  }
  return code;
}
