#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <iostream>

#include "mlunify/cli.hpp"

namespace {

void add_common(CLI::App* cmd, mlu::cli::Config& cfg) {
  cmd->add_option("--sig", cfg.sig_path, "Signature file (symbol <name> [arity <n>] per line)");
  cmd->add_option("--format", cfg.format, "Output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, mlu::cli::Format>{{"text", mlu::cli::Format::Text},
                                                  {"structured", mlu::cli::Format::Structured}},
          CLI::ignore_case));
}

void add_solver(CLI::App* cmd, mlu::cli::Config& cfg) {
  cmd->add_option("--problem", cfg.problem, "Unification problem representation")
      ->check(CLI::IsMember({"set", "list"}));
  cmd->add_option("--strategy", cfg.strategy,
                  "pair: finish the first reducible pair; rule: try each rule over all pairs in priority order")
      ->check(CLI::IsMember({"pair", "rule"}));
}

}  // namespace

int main(int argc, char** argv) {
  mlu::cli::Config cfg;
  CLI::App app{"Syntactic unification for applicative matching logic, with proof certificates"};
  app.require_subcommand(1);

  auto* unify = app.add_subcommand("unify", "Compute a most general unifier");
  unify->add_option("terms", cfg.inputs, "Two terms")->required()->expected(2);
  unify->add_flag("--trace", cfg.trace, "Print every rule application");
  add_common(unify, cfg);
  add_solver(unify, cfg);

  auto* certify = app.add_subcommand("certify", "Unify and write a proof certificate");
  certify->add_option("terms", cfg.inputs, "Two terms")->required()->expected(2);
  certify->add_option("--out", cfg.out_path, "Certificate file (stdout when omitted)");
  certify->add_flag("--expand-chain", cfg.expand_chain, "One soundness leaf per unification step");
  add_common(certify, cfg);
  add_solver(certify, cfg);

  auto* check = app.add_subcommand("check", "Check a certificate file");
  check->add_option("certificate", cfg.inputs, "Certificate file")->required()->expected(1);
  check->add_option("--format", cfg.format, "Output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, mlu::cli::Format>{{"text", mlu::cli::Format::Text},
                                                  {"structured", mlu::cli::Format::Structured}},
          CLI::ignore_case));

  auto* eval = app.add_subcommand("eval", "Check validity of a pattern in a bounded term model");
  eval->add_option("pattern", cfg.inputs, "Pattern")->required()->expected(1);
  eval->add_option("--bound", cfg.bound, "Largest term size in the model")->check(CLI::PositiveNumber);
  eval->add_flag("--all-valuations", cfg.all_valuations,
                 "Also check valuations under which some subterm leaves the model");
  add_common(eval, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mlu::cli::kExitInput;
  }
  for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  return mlu::cli::run(cfg, std::cout, std::cerr);
}
