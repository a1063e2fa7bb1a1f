#pragma once

// Command implementations behind the mlunify executable. Argument parsing
// lives in tools/; everything here takes a parsed Config so it can be driven
// in-process.

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mlunify/certificate.hpp"
#include "mlunify/model.hpp"
#include "mlunify/serialize.hpp"
#include "mlunify/surface.hpp"

namespace mlu::cli {

enum class Format { Text, Structured };

inline constexpr int kExitOk = 0;
inline constexpr int kExitNo = 1;
inline constexpr int kExitInput = 2;

inline constexpr std::size_t kDefaultBound = 3;
inline constexpr std::size_t kMaxEvalVars = 6;

struct Config {
  std::string command;
  std::vector<std::string> inputs;
  std::optional<std::string> sig_path;
  bool trace = false;
  Format format = Format::Text;
  std::size_t bound = kDefaultBound;
  std::optional<std::string> out_path;
  bool all_valuations = false;
  std::string problem = "set";
  std::string strategy = "pair";
  bool expand_chain = false;
};

/// Input problems: bad files, parse errors, bad flags. Exit status 2.
class InputError : public Error {
 public:
  using Error::Error;
};

using Bindings = std::map<std::string, std::string>;

inline Bindings to_bindings(const Substitution& s) {
  Bindings out;
  for (const auto& [x, t] : s.bindings()) out[x] = print_pattern(t);
  return out;
}

inline std::string format_bindings(const Bindings& b) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : b) {
    if (!first) out += ", ";
    first = false;
    out += x + " |-> " + t;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Reports. Each has a text rendering and a JSON form that reads back to an
// equal value.

struct TraceLine {
  std::string rule;
  std::size_t index = 0;
  std::string lhs;
  std::string rhs;
  std::string after;
  friend bool operator==(const TraceLine&, const TraceLine&) = default;
};

struct UnifyReport {
  std::string problem;
  std::string strategy;
  std::string t1;
  std::string t2;
  bool unifiable = false;
  Bindings mgu;
  std::optional<std::string> failure;
  std::optional<std::string> initial;
  std::vector<TraceLine> trace;
  friend bool operator==(const UnifyReport&, const UnifyReport&) = default;
};

struct CertifyReport {
  std::string problem;
  std::string t1;
  std::string t2;
  bool unifiable = false;
  Bindings mgu;
  std::optional<std::string> failure;
  std::size_t equation_nodes = 0;
  std::size_t conjunction_nodes = 0;
  bool self_check = false;
  std::optional<std::string> out;
  friend bool operator==(const CertifyReport&, const CertifyReport&) = default;
};

struct CheckReport {
  std::string file;
  bool accepted = false;
  std::string where;
  std::string path;
  std::string rule;
  std::string message;
  friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

struct EvalReport {
  std::string pattern;
  std::size_t bound = 0;
  std::size_t carrier = 0;
  bool guarded = true;
  bool valid = false;
  std::size_t checked = 0;
  std::optional<Bindings> counterexample;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

namespace detail {

inline Json header(const char* kind) { return Json{{"format_version", kFormatVersion}, {"report", kind}}; }

inline void expect_header(const Json& j, const char* kind) {
  mlu::detail::require_version(j);
  if (mlu::detail::field<std::string>(j, "report") != kind) throw FormatError(std::string("not a ") + kind + " report");
}

template <class T>
std::optional<T> opt_field(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return mlu::detail::field<T>(j, key);
}

template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace detail

inline Json to_json(const UnifyReport& r) {
  Json j = detail::header("unify");
  j["problem"] = r.problem;
  j["strategy"] = r.strategy;
  j["t1"] = r.t1;
  j["t2"] = r.t2;
  j["unifiable"] = r.unifiable;
  j["mgu"] = r.mgu;
  j["failure"] = detail::opt_json(r.failure);
  j["initial"] = detail::opt_json(r.initial);
  Json steps = Json::array();
  for (const auto& s : r.trace) {
    steps.push_back({{"rule", s.rule}, {"index", s.index}, {"pair", {s.lhs, s.rhs}}, {"after", s.after}});
  }
  j["trace"] = steps;
  return j;
}

inline UnifyReport unify_report_from_json(const Json& j) {
  using mlu::detail::field;
  detail::expect_header(j, "unify");
  UnifyReport r{field<std::string>(j, "problem"),
                field<std::string>(j, "strategy"),
                field<std::string>(j, "t1"),
                field<std::string>(j, "t2"),
                field<bool>(j, "unifiable"),
                field<Bindings>(j, "mgu"),
                detail::opt_field<std::string>(j, "failure"),
                detail::opt_field<std::string>(j, "initial"),
                {}};
  for (const auto& s : mlu::detail::member(j, "trace")) {
    auto pair = field<std::vector<std::string>>(s, "pair");
    if (pair.size() != 2) throw FormatError("pair must have two entries");
    r.trace.push_back({field<std::string>(s, "rule"), field<std::size_t>(s, "index"), pair[0], pair[1],
                       field<std::string>(s, "after")});
  }
  return r;
}

inline Json to_json(const CertifyReport& r) {
  Json j = detail::header("certify");
  j["problem"] = r.problem;
  j["t1"] = r.t1;
  j["t2"] = r.t2;
  j["unifiable"] = r.unifiable;
  j["mgu"] = r.mgu;
  j["failure"] = detail::opt_json(r.failure);
  j["equation_nodes"] = r.equation_nodes;
  j["conjunction_nodes"] = r.conjunction_nodes;
  j["self_check"] = r.self_check;
  j["out"] = detail::opt_json(r.out);
  return j;
}

inline CertifyReport certify_report_from_json(const Json& j) {
  using mlu::detail::field;
  detail::expect_header(j, "certify");
  return CertifyReport{field<std::string>(j, "problem"),
                       field<std::string>(j, "t1"),
                       field<std::string>(j, "t2"),
                       field<bool>(j, "unifiable"),
                       field<Bindings>(j, "mgu"),
                       detail::opt_field<std::string>(j, "failure"),
                       field<std::size_t>(j, "equation_nodes"),
                       field<std::size_t>(j, "conjunction_nodes"),
                       field<bool>(j, "self_check"),
                       detail::opt_field<std::string>(j, "out")};
}

inline Json to_json(const CheckReport& r) {
  Json j = detail::header("check");
  j["file"] = r.file;
  j["accepted"] = r.accepted;
  j["where"] = r.where;
  j["path"] = r.path;
  j["rule"] = r.rule;
  j["message"] = r.message;
  return j;
}

inline CheckReport check_report_from_json(const Json& j) {
  using mlu::detail::field;
  detail::expect_header(j, "check");
  return CheckReport{field<std::string>(j, "file"),  field<bool>(j, "accepted"),      field<std::string>(j, "where"),
                     field<std::string>(j, "path"),  field<std::string>(j, "rule"),   field<std::string>(j, "message")};
}

inline Json to_json(const EvalReport& r) {
  Json j = detail::header("eval");
  j["pattern"] = r.pattern;
  j["bound"] = r.bound;
  j["carrier"] = r.carrier;
  j["guarded"] = r.guarded;
  j["valid"] = r.valid;
  j["checked"] = r.checked;
  j["counterexample"] = detail::opt_json(r.counterexample);
  return j;
}

inline EvalReport eval_report_from_json(const Json& j) {
  using mlu::detail::field;
  detail::expect_header(j, "eval");
  return EvalReport{field<std::string>(j, "pattern"),
                    field<std::size_t>(j, "bound"),
                    field<std::size_t>(j, "carrier"),
                    field<bool>(j, "guarded"),
                    field<bool>(j, "valid"),
                    field<std::size_t>(j, "checked"),
                    detail::opt_field<Bindings>(j, "counterexample")};
}

inline std::string to_text(const UnifyReport& r) {
  std::string out;
  if (r.initial) {
    out += "      " + *r.initial + "\n";
    for (const auto& s : r.trace) out += s.rule + "  <" + s.lhs + ", " + s.rhs + "> -> " + s.after + "\n";
  }
  if (r.unifiable) return out + "MGU: " + format_bindings(r.mgu) + "\n";
  return out + "FAIL: " + r.failure.value_or("?") + "\n";
}

inline std::string to_text(const CertifyReport& r) {
  if (!r.unifiable) return "FAIL: " + r.failure.value_or("?") + "\n";
  std::string out = "MGU: " + format_bindings(r.mgu) + "\n";
  out += "equation proof: " + std::to_string(r.equation_nodes) + " nodes\n";
  out += "conjunction proof: " + std::to_string(r.conjunction_nodes) + " nodes\n";
  out += std::string("self-check: ") + (r.self_check ? "ACCEPT" : "REJECT") + "\n";
  if (r.out) out += "written to " + *r.out + "\n";
  return out;
}

inline std::string to_text(const CheckReport& r) {
  if (r.accepted) return "ACCEPT\n";
  std::string out = "REJECT (" + r.where + ")";
  if (!r.path.empty()) out += " at " + r.path + " [" + r.rule + "]";
  return out + ": " + r.message + "\n";
}

inline std::string to_text(const EvalReport& r) {
  const std::string stats = "checked " + std::to_string(r.checked) + " valuations, carrier " +
                            std::to_string(r.carrier) + ", bound " + std::to_string(r.bound) +
                            (r.guarded ? ", in-bound valuations only" : ", all valuations");
  if (r.valid) return "VALID (" + stats + ")\n";
  return "NOT-VALID (" + stats + ")\ncounterexample: " + format_bindings(r.counterexample.value_or(Bindings{})) + "\n";
}

// ---------------------------------------------------------------------------
// Commands.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Signature load_signature(const Config& cfg) {
  if (!cfg.sig_path) return Signature{};
  try {
    return parse_signature(read_file(*cfg.sig_path));
  } catch (const ParseError& e) {
    std::string msg;
    for (const auto& d : e.diagnostics()) {
      if (!msg.empty()) msg += '\n';
      msg += *cfg.sig_path + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.message;
    }
    throw InputError(msg);
  }
}

inline Pattern read_input(const std::string& text, Signature& sig, bool term) {
  try {
    return term ? parse_term(text, sig) : parse_pattern(text, sig);
  } catch (const ParseError& e) {
    std::string msg;
    for (const auto& d : e.diagnostics()) {
      if (!msg.empty()) msg += '\n';
      msg += "input:" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.message;
    }
    throw InputError(msg);
  }
}

inline Strategy strategy_of(const Config& cfg) {
  if (cfg.strategy == "pair") return Strategy::PairFirst;
  if (cfg.strategy == "rule") return Strategy::RuleFirst;
  throw InputError("unknown strategy '" + cfg.strategy + "' (expected pair or rule)");
}

template <class F>
decltype(auto) with_problem(const Config& cfg, F&& f) {
  if (cfg.problem == "set") return f(SetProblem::empty());
  if (cfg.problem == "list") return f(ListProblem::empty());
  throw InputError("unknown problem kind '" + cfg.problem + "' (expected set or list)");
}

inline void expect_inputs(const Config& cfg, std::size_t n) {
  if (cfg.inputs.size() != n) {
    throw InputError(cfg.command + " expects " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
  }
}

inline UnifyReport unify_report(const Config& cfg) {
  expect_inputs(cfg, 2);
  Signature sig = load_signature(cfg);
  const Pattern t1 = read_input(cfg.inputs[0], sig, true);
  const Pattern t2 = read_input(cfg.inputs[1], sig, true);
  const Strategy strategy = strategy_of(cfg);
  return with_problem(cfg, [&](auto tag) {
    using P = decltype(tag);
    const auto r = solve<P>(t1, t2, strategy);
    UnifyReport out{cfg.problem, cfg.strategy, print_pattern(t1), print_pattern(t2), r.mgu.has_value(), {}, {}, {}, {}};
    if (r.mgu) out.mgu = to_bindings(*r.mgu);
    if (r.failure) out.failure = std::string(rule_name(*r.failure));
    if (cfg.trace) {
      out.initial = format_problem(r.trace.initial);
      for (const auto& s : r.trace.steps) {
        out.trace.push_back({std::string(rule_name(s.rule)), s.index, print_pattern(s.pair.lhs),
                             print_pattern(s.pair.rhs), format_problem(s.after)});
      }
    }
    return out;
  });
}

struct CertifyOutcome {
  CertifyReport report;
  std::optional<Certificate> certificate;
};

inline CertifyOutcome certify_outcome(const Config& cfg) {
  expect_inputs(cfg, 2);
  Signature sig = load_signature(cfg);
  const Pattern t1 = read_input(cfg.inputs[0], sig, true);
  const Pattern t2 = read_input(cfg.inputs[1], sig, true);
  const Strategy strategy = strategy_of(cfg);
  return with_problem(cfg, [&](auto tag) {
    using P = decltype(tag);
    const auto r = solve<P>(t1, t2, strategy);
    CertifyOutcome o{{cfg.problem, print_pattern(t1), print_pattern(t2), r.mgu.has_value(), {}, {}, 0, 0, false,
                      cfg.out_path},
                     std::nullopt};
    if (!r.mgu) {
      o.report.failure = std::string(rule_name(*r.failure));
      o.report.out.reset();
      return o;
    }
    o.report.mgu = to_bindings(*r.mgu);
    CertificateOptions opts;
    opts.expand_chain = cfg.expand_chain;
    o.certificate = generate_certificate(sig, t1, t2, r.trace, *r.mgu, opts);
    o.report.equation_nodes = tree_size(o.certificate->equation_proof);
    o.report.conjunction_nodes = tree_size(o.certificate->conjunction_proof);
    o.report.self_check = check_certificate(*o.certificate).accepted;
    return o;
  });
}

inline CheckReport check_report(const Config& cfg) {
  expect_inputs(cfg, 1);
  const std::string text = read_file(cfg.inputs[0]);
  const Certificate c = read_certificate(text);
  const Verdict v = check_certificate(c);
  CheckReport r{cfg.inputs[0], v.accepted, v.where, "", "", v.message};
  if (!v.accepted && !v.detail.ok) {
    r.path = v.detail.path;
    r.rule = v.detail.rule;
  }
  return r;
}

/// Signature used by eval when none is given: one constant `c`. Numerals in
/// the pattern are added as further constants.
inline Signature default_eval_signature() {
  Signature sig;
  sig.declare("c", 0u);
  return sig;
}

inline EvalReport eval_report(const Config& cfg) {
  expect_inputs(cfg, 1);
  if (cfg.bound < 1) throw InputError("--bound must be at least 1");
  Signature sig = cfg.sig_path ? load_signature(cfg) : default_eval_signature();
  const Pattern p = read_input(cfg.inputs[0], sig, false);
  bool has_constant = false;
  for (const auto& [name, arity] : sig.symbols()) has_constant = has_constant || arity.value_or(0) == 0;
  if (!has_constant) throw InputError("the signature has no nullary symbol, so the term model is empty");
  if (free_vars(p).size() > kMaxEvalVars) {
    throw InputError("eval supports at most " + std::to_string(kMaxEvalVars) + " free variables");
  }
  const FiniteModel m = make_term_model(sig, cfg.bound);
  const Validity v = cfg.all_valuations ? validate(m, p) : validate_within(m, p, term_guards(p));
  EvalReport r{print_pattern(p), cfg.bound, m.size(), !cfg.all_valuations, v.valid, v.checked, std::nullopt};
  if (!v.valid) {
    Bindings b;
    if (v.counterexample) {
      for (const auto& [x, e] : *v.counterexample) b[x] = m.element_name(e);
    }
    r.counterexample = b;
  }
  return r;
}

template <class R>
void emit(const Config& cfg, const R& r, std::ostream& out) {
  if (cfg.format == Format::Structured) {
    out << to_json(r).dump(2) << "\n";
  } else {
    out << to_text(r);
  }
}

/// Runs one command. Returns the process exit status.
inline int run(const Config& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "unify") {
      const auto r = unify_report(cfg);
      emit(cfg, r, out);
      return r.unifiable ? kExitOk : kExitNo;
    }
    if (cfg.command == "certify") {
      const auto o = certify_outcome(cfg);
      if (o.certificate) {
        const std::string text = write_certificate(*o.certificate);
        if (!cfg.out_path) {
          out << text;
          return kExitOk;
        }
        std::ofstream f(*cfg.out_path, std::ios::binary);
        if (!f || !(f << text) || !(f.flush())) throw InputError("cannot write '" + *cfg.out_path + "'");
      }
      emit(cfg, o.report, out);
      return o.certificate ? kExitOk : kExitNo;
    }
    if (cfg.command == "check") {
      const auto r = check_report(cfg);
      emit(cfg, r, out);
      return r.accepted ? kExitOk : kExitNo;
    }
    if (cfg.command == "eval") {
      const auto r = eval_report(cfg);
      emit(cfg, r, out);
      return r.valid ? kExitOk : kExitNo;
    }
    throw InputError("unknown command '" + cfg.command + "'");
  } catch (const FormatError& e) {
    err << "error: malformed certificate: " << e.what() << "\n";
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInput;
}

}  // namespace mlu::cli
