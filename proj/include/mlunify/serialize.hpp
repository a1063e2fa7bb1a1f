#pragma once

// JSON encoding of signatures, substitutions, traces and certificates.
// Patterns are stored as surface-syntax text.

#include <nlohmann/json.hpp>

#include <memory>
#include <string>
#include <variant>

#include "mlunify/certificate.hpp"
#include "mlunify/surface.hpp"

namespace mlu {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Malformed input files; distinct from a well-formed but rejected certificate.
class FormatError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

inline const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline void require_version(const Json& j) {
  const int v = field<int>(j, "format_version");
  if (v != kFormatVersion) throw FormatError("unsupported format_version " + std::to_string(v));
}

}  // namespace detail

/// Reads patterns written by this library: reserved names allowed, symbols
/// resolved against a fixed signature.
class PatternReader {
 public:
  explicit PatternReader(Signature sig) : sig_(std::move(sig)) {}

  Pattern operator()(const Json& j) const {
    if (!j.is_string()) throw FormatError("expected pattern text");
    Signature scratch = sig_;
    try {
      return parse_pattern(j.get<std::string>(), scratch, ParseOptions{true});
    } catch (const ParseError& e) {
      throw FormatError("bad pattern '" + j.get<std::string>() + "': " + e.what());
    }
  }

  Pattern term(const Json& j) const {
    Pattern p = (*this)(j);
    if (!p.is_term()) throw FormatError("expected a term pattern");
    return p;
  }

  const Signature& signature() const { return sig_; }

 private:
  Signature sig_;
};

// ---------------------------------------------------------------------------
// Signatures, theories, substitutions.

inline Json signature_to_json(const Signature& sig) {
  Json out = Json::array();
  for (const auto& [name, arity] : sig.symbols()) {
    Json s{{"name", name}};
    if (arity) s["arity"] = *arity;
    out.push_back(s);
  }
  return out;
}

inline Signature signature_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("signature must be a list");
  Signature sig;
  for (const auto& s : j) {
    std::optional<unsigned> arity;
    if (s.contains("arity")) arity = detail::field<unsigned>(s, "arity");
    try {
      sig.declare(detail::field<std::string>(s, "name"), arity);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what());
    }
  }
  return sig;
}

inline Json theory_to_json(const Theory& t) {
  Json out = Json::array();
  for (const auto& s : t.schemes()) {
    if (std::holds_alternative<DefinednessScheme>(s)) {
      out.push_back({{"scheme", "definedness"}});
    } else if (const auto* inj = std::get_if<InjectivityScheme>(&s)) {
      out.push_back({{"scheme", "injectivity"}, {"symbol", inj->symbol}, {"arity", inj->arity}});
    } else {
      out.push_back({{"scheme", "axiom"}, {"pattern", print_pattern(std::get<UserAxiom>(s).axiom)}});
    }
  }
  return out;
}

inline Theory theory_from_json(const Json& j, const PatternReader& read) {
  if (!j.is_array()) throw FormatError("theory must be a list");
  Theory t;
  for (const auto& s : j) {
    const auto kind = detail::field<std::string>(s, "scheme");
    if (kind == "definedness") {
      t.add(DefinednessScheme{});
    } else if (kind == "injectivity") {
      t.add(InjectivityScheme{detail::field<std::string>(s, "symbol"), detail::field<unsigned>(s, "arity")});
    } else if (kind == "axiom") {
      t.add(UserAxiom{read(detail::member(s, "pattern"))});
    } else {
      throw FormatError("unknown scheme '" + kind + "'");
    }
  }
  return t;
}

inline Json substitution_to_json(const Substitution& s) {
  Json out = Json::object();
  for (const auto& [x, t] : s.bindings()) out[x] = print_pattern(t);
  return out;
}

inline Substitution substitution_from_json(const Json& j, const PatternReader& read) {
  if (!j.is_object()) throw FormatError("substitution must be an object");
  Substitution s;
  for (const auto& [x, t] : j.items()) s.bind(x, read.term(t));
  return s;
}

// ---------------------------------------------------------------------------
// Problems, steps, traces.

template <UnificationProblem P>
Json problem_to_json(const P& p) {
  if (p.is_failed()) return nullptr;
  Json out = Json::array();
  for (const auto& e : p.pairs()) out.push_back(Json::array({print_pattern(e.lhs), print_pattern(e.rhs)}));
  return out;
}

template <UnificationProblem P>
P problem_from_json(const Json& j, const PatternReader& read) {
  if (j.is_null()) return P::failed();
  if (!j.is_array()) throw FormatError("problem must be null or a list of pairs");
  std::vector<Equation> eqs;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw FormatError("pair must have two entries");
    eqs.push_back({read.term(e[0]), read.term(e[1])});
  }
  // Lists keep the given order; sets re-sort, so a reordered file still
  // denotes the same set.
  return P::from_pairs(std::move(eqs));
}

template <UnificationProblem P>
Json step_to_json(const UnifStep<P>& s) {
  return Json{{"rule", std::string(rule_name(s.rule))},
              {"index", s.index},
              {"pair", Json::array({print_pattern(s.pair.lhs), print_pattern(s.pair.rhs)})},
              {"before", problem_to_json(s.before)},
              {"after", problem_to_json(s.after)}};
}

template <UnificationProblem P>
UnifStep<P> step_from_json(const Json& j, const PatternReader& read) {
  const auto name = detail::field<std::string>(j, "rule");
  auto rule = rule_from_name(name);
  if (!rule) throw FormatError("unknown unification rule '" + name + "'");
  const Json& pair = detail::member(j, "pair");
  if (!pair.is_array() || pair.size() != 2) throw FormatError("pair must have two entries");
  return UnifStep<P>{*rule, detail::field<std::size_t>(j, "index"), Equation{read.term(pair[0]), read.term(pair[1])},
                     problem_from_json<P>(detail::member(j, "before"), read),
                     problem_from_json<P>(detail::member(j, "after"), read)};
}

template <UnificationProblem P>
Json trace_to_json(const UnifTrace<P>& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back(step_to_json(s));
  return Json{{"instance", std::string(P::kind_name)}, {"initial", problem_to_json(t.initial)}, {"steps", steps}};
}

template <UnificationProblem P>
UnifTrace<P> trace_from_json(const Json& j, const PatternReader& read) {
  UnifTrace<P> t{problem_from_json<P>(detail::member(j, "initial"), read), {}};
  const Json& steps = detail::member(j, "steps");
  if (!steps.is_array()) throw FormatError("steps must be a list");
  for (const auto& s : steps) t.steps.push_back(step_from_json<P>(s, read));
  return t;
}

inline Json any_trace_to_json(const AnyTrace& t) {
  return std::visit([](const auto& x) { return trace_to_json(x); }, t);
}

inline AnyTrace any_trace_from_json(const Json& j, const PatternReader& read) {
  const auto kind = detail::field<std::string>(j, "instance");
  if (kind == SetProblem::kind_name) return trace_from_json<SetProblem>(j, read);
  if (kind == ListProblem::kind_name) return trace_from_json<ListProblem>(j, read);
  throw FormatError("unknown problem instance '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Proof trees.

inline Json proof_to_json(const ProofNode& n) {
  Json params = Json::object();
  const RuleParams& p = n.params;
  if (!p.indices.empty()) params["indices"] = p.indices;
  if (!p.vars.empty()) params["vars"] = p.vars;
  if (!p.patterns.empty()) {
    Json ps = Json::array();
    for (const auto& x : p.patterns) ps.push_back(print_pattern(x));
    params["patterns"] = ps;
  }
  if (p.context) params["context"] = {{"hole", p.context->hole()}, {"pattern", print_pattern(p.context->pattern())}};
  if (p.subst) params["subst"] = substitution_to_json(*p.subst);
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, UnifStep<SetProblem>> || std::is_same_v<E, UnifStep<ListProblem>>) {
          Json s = step_to_json(e);
          s["instance"] = std::string(decltype(e.before)::kind_name);
          params["step"] = s;
        } else if constexpr (!std::is_same_v<E, std::monostate>) {
          params["trace"] = trace_to_json(e);
        }
      },
      p.evidence);

  Json ctx = Json::array();
  for (const auto& h : n.conclusion.context) ctx.push_back(print_pattern(h));
  Json children = Json::array();
  for (const auto& c : n.children) children.push_back(proof_to_json(c));
  return Json{{"sequent", {{"context", ctx}, {"goal", print_pattern(n.conclusion.goal)}}},
              {"kind", std::holds_alternative<CoreRule>(n.rule) ? "core" : "derived"},
              {"rule", std::string(rule_name(n.rule))},
              {"params", params},
              {"children", children}};
}

inline ProofNode proof_from_json(const Json& j, const TheoryRef& theory, const PatternReader& read) {
  ProofNode n;
  const Json& seq = detail::member(j, "sequent");
  n.conclusion.theory = theory;
  const Json& ctx = detail::member(seq, "context");
  if (!ctx.is_array()) throw FormatError("context must be a list");
  for (const auto& h : ctx) n.conclusion.context.push_back(read(h));
  n.conclusion.goal = read(detail::member(seq, "goal"));

  const auto kind = detail::field<std::string>(j, "kind");
  const auto name = detail::field<std::string>(j, "rule");
  if (kind == "core") {
    auto r = core_rule_from_name(name);
    if (!r) throw FormatError("unknown core rule '" + name + "'");
    n.rule = *r;
  } else if (kind == "derived") {
    auto r = derived_rule_from_name(name);
    if (!r) throw FormatError("unknown derived rule '" + name + "'");
    n.rule = *r;
  } else {
    throw FormatError("rule kind must be 'core' or 'derived'");
  }

  const Json& params = detail::member(j, "params");
  if (!params.is_object()) throw FormatError("params must be an object");
  RuleParams& p = n.params;
  if (params.contains("indices")) p.indices = detail::field<std::vector<std::size_t>>(params, "indices");
  if (params.contains("vars")) p.vars = detail::field<std::vector<std::string>>(params, "vars");
  if (params.contains("patterns")) {
    for (const auto& x : params.at("patterns")) p.patterns.push_back(read(x));
  }
  if (params.contains("context")) {
    const Json& c = params.at("context");
    try {
      p.context = PatternContext(read(detail::member(c, "pattern")), detail::field<std::string>(c, "hole"));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what());
    }
  }
  if (params.contains("subst")) p.subst = substitution_from_json(params.at("subst"), read);
  if (params.contains("step")) {
    const Json& s = params.at("step");
    const auto inst = detail::field<std::string>(s, "instance");
    if (inst == SetProblem::kind_name) {
      p.evidence = step_from_json<SetProblem>(s, read);
    } else if (inst == ListProblem::kind_name) {
      p.evidence = step_from_json<ListProblem>(s, read);
    } else {
      throw FormatError("unknown problem instance '" + inst + "'");
    }
  }
  if (params.contains("trace")) {
    std::visit([&](auto&& t) { p.evidence = std::move(t); }, any_trace_from_json(params.at("trace"), read));
  }

  const Json& children = detail::member(j, "children");
  if (!children.is_array()) throw FormatError("children must be a list");
  for (const auto& c : children) n.children.push_back(proof_from_json(c, theory, read));
  return n;
}

// ---------------------------------------------------------------------------
// Certificates.

inline Json certificate_to_json(const Certificate& c) {
  return Json{{"format_version", kFormatVersion},
              {"kind", "certificate"},
              {"signature", signature_to_json(c.signature)},
              {"theory", theory_to_json(*c.theory)},
              {"t1", print_pattern(c.t1)},
              {"t2", print_pattern(c.t2)},
              {"sigma", substitution_to_json(c.sigma)},
              {"trace", any_trace_to_json(c.trace)},
              {"proofs", {{"equation", proof_to_json(c.equation_proof)},
                          {"conjunction", proof_to_json(c.conjunction_proof)}}}};
}

inline Certificate certificate_from_json(const Json& j) {
  try {
    detail::require_version(j);
    if (detail::field<std::string>(j, "kind") != "certificate") throw FormatError("not a certificate");
    Signature sig = signature_from_json(detail::member(j, "signature"));
    PatternReader read(sig);
    auto theory = std::make_shared<const Theory>(theory_from_json(detail::member(j, "theory"), read));
    const Json& proofs = detail::member(j, "proofs");
    return Certificate{sig,
                       theory,
                       read.term(detail::member(j, "t1")),
                       read.term(detail::member(j, "t2")),
                       substitution_from_json(detail::member(j, "sigma"), read),
                       any_trace_from_json(detail::member(j, "trace"), read),
                       proof_from_json(detail::member(proofs, "equation"), theory, read),
                       proof_from_json(detail::member(proofs, "conjunction"), theory, read)};
  } catch (const FormatError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  } catch (const Error& e) {
    throw FormatError(e.what());
  }
}

inline std::string write_certificate(const Certificate& c) { return certificate_to_json(c).dump() + "\n"; }

inline Certificate read_certificate(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("not valid JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

}  // namespace mlu
