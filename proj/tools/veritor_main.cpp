// Command line front end. Each subcommand loads a key=value config, runs the
// corresponding verification pipeline, and writes a plain-text certificate.
//
// Exit codes: 0 all claims verified, 2 verification ran but failed (a
// certificate recording the failure is still written), 1 usage or config
// errors.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "veritor/run.hpp"
#include "veritor/version.hpp"

namespace {

struct SubArgs {
  std::string config;
  std::string out;
  int threads = 0;
};

void add_common(CLI::App* sub, SubArgs& args) {
  sub->add_option("--config", args.config, "key=value config file")
      ->required();
  sub->add_option("--out", args.out,
                  "certificate path (default: from config or <config>.cert.txt)");
  sub->add_option("--threads", args.threads,
                  "worker threads (default: config or all cores)");
}

int dispatch(const std::string& task, const SubArgs& args) {
  veritor::Config cfg = veritor::Config::load(args.config);
  if (cfg.get_string("task") != task)
    throw veritor::ConfigError("config task '" + cfg.get_string("task") +
                               "' does not match subcommand '" + task + "'");
  veritor::RunResult res = veritor::run_task(cfg, args.threads, args.out);
  std::cout << res.summary << "\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"veritor: computer-checked invariant circle and torus certificates"};
  app.set_version_flag("--version", std::string("veritor ") + veritor::kVersion);
  app.require_subcommand(1);

  SubArgs circle_args, conn_args, orbit_args;
  CLI::App* circle = app.add_subcommand(
      "verify-circle", "certify an attracting invariant circle of a planar map");
  add_common(circle, circle_args);
  CLI::App* conn = app.add_subcommand(
      "verify-connection",
      "certify heteroclinic connections forming a resonant torus");
  add_common(conn, conn_args);
  CLI::App* orbit = app.add_subcommand(
      "find-periodic", "certify periodic orbit enclosures via interval Newton");
  add_common(orbit, orbit_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (circle->parsed()) return dispatch("verify-circle", circle_args);
    if (conn->parsed()) return dispatch("verify-connection", conn_args);
    if (orbit->parsed()) return dispatch("find-periodic", orbit_args);
  } catch (const veritor::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
