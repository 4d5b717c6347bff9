// SPDX-License-Identifier: Apache-2.0
// Command-line front end; all logic lives in plrev/cli.hpp.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plrev/cli.hpp"

int main(int argc, char** argv) {
  using namespace plrev::cli;
  CLI::App app{"Exact reversibility and factorization tools for piecewise linear homeomorphisms"};
  app.require_subcommand(1);

  std::string map, reverser, window, claim, format = "json", cert_path;
  std::vector<std::string> points;
  std::optional<std::string> reverser_opt, window_opt;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));
  };

  auto* analyze = app.add_subcommand("analyze", "Invariants and reversibility flags of a map");
  analyze->add_option("map", map, "Map text, JSON, or @file")->required();
  add_format(analyze);

  auto* eval = app.add_subcommand("eval", "Evaluate a map at exact points");
  eval->add_option("map", map, "Map text, JSON, or @file")->required();
  eval->add_option("points", points, "Points")->required();
  add_format(eval);

  auto* dump = app.add_subcommand("dump", "Breakpoints of a map inside a window");
  dump->add_option("map", map, "Map text, JSON, or @file")->required();
  dump->add_option("--window", window, "Window lo..hi")->required();
  add_format(dump);

  auto* rcheck = app.add_subcommand("reverse-check", "Check h f h^-1 = f^-1");
  rcheck->add_option("map", map, "Map text, JSON, or @file")->required();
  rcheck->add_option("--reverser", reverser, "Reverser h")->required();
  rcheck->add_option("--window", window_opt, "Window lo..hi for lazy maps");
  add_format(rcheck);

  auto* strongify = app.add_subcommand("strongify", "Turn a reverser into an involutive reverser");
  strongify->add_option("map", map, "Map text, JSON, or @file")->required();
  strongify->add_option("--reverser", reverser, "Reverser h")->required();
  add_format(strongify);

  auto* factor = app.add_subcommand("factor", "Emit a certificate for a membership claim");
  factor->add_option("map", map, "Map text, JSON, or @file")->required();
  factor->add_option("--claim", claim, "Claim")->required()->check(CLI::IsMember(factor_claims()));
  factor->add_option("--reverser", reverser_opt, "Reverser for reverses/strong claims");
  add_format(factor);

  auto* verify = app.add_subcommand("verify-cert", "Check a certificate (- reads stdin)");
  verify->add_option("certificate", cert_path, "Certificate file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Outcome r;
  if (*analyze) r = cmd_analyze(map);
  else if (*eval) r = cmd_eval(map, points);
  else if (*dump) r = cmd_dump(map, window);
  else if (*rcheck) r = cmd_reverse_check(map, reverser, window_opt);
  else if (*strongify) r = cmd_strongify(map, reverser);
  else if (*factor) r = cmd_factor(map, claim, reverser_opt);
  else r = cmd_verify_file(cert_path);

  std::cout << r.out;
  std::cerr << r.err;
  return r.code;
}
