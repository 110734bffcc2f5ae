#include <unistd.h>

#include <iostream>

#include "CLI11.hpp"
#include "vl/cli.hpp"

int main(int argc, char** argv) {
  using vl::cli::Command;
  vl::cli::CliConfig cfg;
  std::string extract;

  CLI::App app{"vlc: type checker and interpreter for the versioned lambda calculus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vlc 0.1.0");

  auto* check = app.add_subcommand("check", "Type-check a program and print its type");
  auto* eval = app.add_subcommand("eval", "Type-check, then evaluate a program");
  auto* repl = app.add_subcommand("repl", "Read expressions line by line (:t e for the type, :q to quit)");
  auto* meta = app.add_subcommand("meta", "Run the metatheory property suites");

  for (auto* sub : {check, eval}) {
    sub->add_option("input", cfg.input, "File, '-' for stdin, or an inline expression")->required();
    sub->add_flag("--json", cfg.json, "Machine-readable output");
  }
  eval->add_option("--fuel", cfg.fuel, "Step limit")->check(CLI::PositiveNumber);
  eval->add_flag("--trace", cfg.trace, "Print every reduction step");
  eval->add_option("--extract", extract, "Extract the result at this version label");
  repl->add_option("--fuel", cfg.fuel, "Step limit")->check(CLI::PositiveNumber);
  repl->add_flag("--trace", cfg.trace, "Print every reduction step");
  repl->add_flag("--json", cfg.json, "One JSON document per line");
  meta->add_option("--seed", cfg.seed, "Generator seed");
  meta->add_option("--cases", cfg.cases, "Closed-term cases (lemmas use half)")->check(CLI::PositiveNumber);
  meta->add_option("--depth", cfg.depth, "Maximum term depth")->check(CLI::PositiveNumber);
  meta->add_option("--fuel", cfg.fuel, "Step limit along traces")->check(CLI::PositiveNumber);
  meta->add_flag("--json", cfg.json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : vl::cli::kInputError;
  }

  if (*check) cfg.command = Command::Check;
  if (*eval) cfg.command = Command::Eval;
  if (*repl) cfg.command = Command::Repl;
  if (*meta) cfg.command = Command::Meta;
  if (!extract.empty()) cfg.extract_label = extract;
  cfg.prompt = cfg.command == Command::Repl && isatty(STDIN_FILENO);

  return vl::cli::run(cfg, std::cin, std::cout, std::cerr);
}
