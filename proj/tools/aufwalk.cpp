// aufwalk: command-line front end. One subcommand, one config file, a few overrides.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "auf/orchestrator.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Random walks on the dual of A_u(F): kernels, audits and boundary profiles"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<int> radius;
  std::optional<double> q;
  std::optional<std::string> out;

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--radius", radius, "override ballRadius");
    sub->add_option("--q", q, "override the model with F = diag(q^1/2, q^-1/2)");
    sub->add_option("--out", out, "override outputDir (wins over AUFWALK_OUT)");
    return sub;
  };
  CLI::App* walk = add("walk", "transition matrix, Green/Martin tables and run manifest");
  CLI::App* audit = add("audit", "run every audit and write audit.json");
  CLI::App* boundary = add("boundary", "K_P and K_Q profiles along the configured rays");
  CLI::App* inter = add("intertwiner", "ranks of p_x and Vtilde norms against the closed form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auf::RunConfig cfg = auf::load_config(config_path);
    auf::Overrides o;
    o.radius = radius;
    o.q = q;
    if (const char* env = std::getenv("AUFWALK_OUT"); env && *env) o.out = std::filesystem::path(env);
    if (out) o.out = std::filesystem::path(*out);
    auf::apply_overrides(cfg, o);
    if (walk->parsed()) return auf::cmd_walk(cfg, std::cerr);
    if (audit->parsed()) return auf::cmd_audit(cfg, std::cerr);
    if (boundary->parsed()) return auf::cmd_boundary(cfg, std::cerr);
    if (inter->parsed()) return auf::cmd_intertwiner(cfg, std::cerr);
  } catch (const auf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return auf::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
