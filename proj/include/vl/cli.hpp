#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vl/evaluator.hpp"
#include "vl/harness/suite.hpp"
#include "vl/json.hpp"
#include "vl/parser.hpp"
#include "vl/printer.hpp"
#include "vl/typechecker.hpp"

namespace vl::cli {

enum class Command { Check, Eval, Repl, Meta };

struct CliConfig {
  Command command = Command::Check;
  std::string input;  // path, `-` for stdin, or the program itself
  int fuel = 10000;
  bool trace = false;
  std::optional<std::string> extract_label;
  bool json = false;
  std::uint64_t seed = 42;
  int cases = 1000;
  int depth = 5;
  bool prompt = false;  // repl only
};

enum Exit : int { kOk = 0, kTypeError = 1, kInputError = 2, kRuntimeError = 3 };

namespace detail {

struct InputError {
  std::string message;
};

inline std::string read_source(const std::string& input, std::istream& in) {
  if (input == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::error_code ec;
  if (std::filesystem::is_regular_file(input, ec)) {
    std::ifstream f(input, std::ios::binary);
    if (!f) throw InputError{"cannot read " + input};
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  if (input.size() > 3 && input.ends_with(".vl")) throw InputError{"no such file: " + input};
  return input;
}

inline std::string parse_message(const ParseError& e) {
  std::string msg = e.what();
  auto pos = msg.find(": ");
  return pos == std::string::npos ? msg : msg.substr(pos + 2);
}

inline nlohmann::json parse_error_json(const ParseError& e) {
  return {{"code", "ParseError"},          {"message", parse_message(e)},
          {"line", e.where().line},        {"col", e.where().col},
          {"expected_labels", nlohmann::json::array()}, {"vars", nlohmann::json::array()}};
}

inline nlohmann::json failure_json(const std::vector<Diagnostic>& ds) {
  auto arr = nlohmann::json::array();
  for (const auto& d : ds) arr.push_back(to_json(d));
  return {{"ok", false}, {"diagnostics", arr}};
}

class Session {
 public:
  Session(const CliConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  int check(const std::string& src) {
    auto t = parse_or_report(src);
    if (!t) return kInputError;
    auto r = check_program(*t);
    if (!r.ok()) return report(r.diagnostics);
    if (cfg_.json)
      out_ << nlohmann::json{{"ok", true}, {"type", r.type->to_string()}}.dump() << "\n";
    else
      out_ << r.type->to_string() << "\n";
    return kOk;
  }

  int eval(const std::string& src) {
    auto t = parse_or_report(src);
    if (!t) return kInputError;
    Term program = *t;
    if (cfg_.extract_label) program = Term::extract(program, Label(*cfg_.extract_label), program.span());
    auto r = check_program(program);
    if (!r.ok()) return report(r.diagnostics);

    std::vector<std::string> trace;
    TraceSink sink;
    if (cfg_.trace)
      sink = [&](const Term&, const StepResult& s) {
        for (auto& line : trace_lines(s)) trace.push_back(std::move(line));
      };
    auto result = evaluate(program, cfg_.fuel, sink);

    if (cfg_.json) {
      nlohmann::json doc{{"ok", result.ok()}, {"type", r.type->to_string()}, {"steps", result.steps}};
      if (cfg_.trace) doc["trace"] = trace;
      if (result.ok())
        doc["value"] = print(result.term);
      else
        doc["error"] = {{"code", result.status == EvalResult::Status::Stuck ? "Stuck" : "FuelExhausted"},
                        {"message", result.reason},
                        {"term", print(result.term)}};
      out_ << doc.dump() << "\n";
    } else {
      for (const auto& line : trace) out_ << line << "\n";
      if (result.ok()) out_ << print(result.term) << "\n";
    }
    if (result.ok()) return kOk;
    if (!cfg_.json) {
      const char* what = result.status == EvalResult::Status::Stuck ? "stuck" : "fuel exhausted";
      err_ << "runtime error: " << what << ": " << result.reason << "\n";
    }
    return kRuntimeError;
  }

 private:
  std::optional<Term> parse_or_report(const std::string& src) {
    try {
      return parse(src);
    } catch (const ParseError& e) {
      if (cfg_.json)
        out_ << nlohmann::json{{"ok", false}, {"diagnostics", {parse_error_json(e)}}}.dump() << "\n";
      else
        err_ << e.where().line << ":" << e.where().col << ": error[ParseError]: " << parse_message(e) << "\n";
      return std::nullopt;
    }
  }

  int report(const std::vector<Diagnostic>& ds) {
    if (cfg_.json) {
      out_ << failure_json(ds).dump() << "\n";
    } else {
      for (const auto& d : ds) err_ << d.render() << "\n";
    }
    return kTypeError;
  }

  const CliConfig& cfg_;
  std::ostream& out_;
  std::ostream& err_;
};

inline int repl(const CliConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  Session s(cfg, out, err);
  std::string line;
  for (;;) {
    if (cfg.prompt) out << "vl> " << std::flush;
    if (!std::getline(in, line)) break;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (line.rfind("--", 0) == 0) continue;
    if (line.rfind(":q", 0) == 0) break;
    if (line.rfind(":t", 0) == 0 && (line.size() == 2 || line[2] == ' ' || line[2] == '\t')) {
      s.check(line.substr(2));
      continue;
    }
    s.eval(line);
  }
  if (cfg.prompt) out << "\n";
  return kOk;
}

inline int meta(const CliConfig& cfg, std::ostream& out) {
  harness::HarnessConfig h;
  h.gen.seed = cfg.seed;
  h.gen.cases = cfg.cases;
  h.gen.max_depth = cfg.depth;
  h.fuel = cfg.fuel;
  h.lemma_cases = std::max(1, cfg.cases / 2);
  auto reports = harness::run_all(h);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.ok();

  if (cfg.json) {
    auto props = nlohmann::json::array();
    for (const auto& r : reports) {
      nlohmann::json p{{"name", r.name},       {"cases", r.cases},     {"failures", r.failures},
                       {"passed", r.ok()},     {"seed", r.seed},       {"seconds", r.seconds},
                       {"notes", r.notes}};
      p["counterexample"] = r.counterexample ? nlohmann::json(*r.counterexample) : nlohmann::json(nullptr);
      props.push_back(std::move(p));
    }
    out << nlohmann::json{{"ok", ok}, {"properties", props}}.dump() << "\n";
  } else {
    for (const auto& r : reports) {
      out << r.summary() << "\n";
      for (const auto& n : r.notes) out << "    " << n << "\n";
      if (r.counterexample) out << "    " << *r.counterexample << "\n";
    }
  }
  return ok ? kOk : kTypeError;
}

}  // namespace detail

inline int run(const CliConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  if (cfg.extract_label && !Label::valid(*cfg.extract_label)) {
    err << "error: invalid version label '" << *cfg.extract_label << "'\n";
    return kInputError;
  }
  if (cfg.fuel < 1) {
    err << "error: fuel must be at least 1\n";
    return kInputError;
  }
  switch (cfg.command) {
    case Command::Meta: return detail::meta(cfg, out);
    case Command::Repl: return detail::repl(cfg, in, out, err);
    case Command::Check:
    case Command::Eval: break;
  }
  std::string src;
  try {
    src = detail::read_source(cfg.input, in);
  } catch (const detail::InputError& e) {
    if (cfg.json)
      out << nlohmann::json{{"ok", false}, {"error", {{"code", "IOError"}, {"message", e.message}}}}.dump() << "\n";
    else
      err << "error: " << e.message << "\n";
    return kInputError;
  }
  detail::Session s(cfg, out, err);
  return cfg.command == Command::Check ? s.check(src) : s.eval(src);
}

}  // namespace vl::cli
