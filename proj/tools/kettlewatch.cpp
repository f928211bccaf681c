#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "kw/config.hpp"

namespace {

void add_common_options(CLI::App* sub, std::string& config, std::string& out,
                        kw::RunManifest& m) {
  sub->add_option("--config", config, "experiment config (JSON)")->required();
  sub->add_option("--out", out, "output directory (default: .)");
  sub->add_option("--set", m.overrides,
                  "override a config key: dotted.path=JSON value; repeatable");
  sub->add_option("--seed", m.seed, "override the RNG seed from the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "kettlewatch: repeated projective watching of a moving target --- "
      "discrete chains, the chain ODE and closed-form propagators"};
  app.require_subcommand(1);

  kw::RunManifest m;
  std::string config;
  std::string out = ".";

  CLI::App* zeno = app.add_subcommand(
      "zeno", "static watched projector: chains against the frozen closed form");
  CLI::App* anti = app.add_subcommand(
      "anti-zeno",
      "dragged watched projector: chains against the transport closed form");
  CLI::App* conv = app.add_subcommand(
      "converge", "log-log convergence of the chain error over n");
  CLI::App* resid = app.add_subcommand(
      "residual", "certify the closed form against the chain equation");

  for (CLI::App* sub : {zeno, anti, conv, resid}) {
    add_common_options(sub, config, out, m);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR: usage: " << e.what() << "\n";
    std::cerr << "Run 'kettlewatch --help' for the interface.\n";
    return 2;
  }

  if (zeno->parsed()) m.scenario = "zeno";
  if (anti->parsed()) m.scenario = "anti-zeno";
  if (conv->parsed()) m.scenario = "converge";
  if (resid->parsed()) m.scenario = "residual";
  m.config_path = config;
  m.out_dir = out;

  return kw::dispatch(m);
}
