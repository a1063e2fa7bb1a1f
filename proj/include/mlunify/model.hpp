#pragma once

// Finite models of the applicative semantics, bounded term models, and
// validity checking by enumeration of valuations.

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlunify/pattern.hpp"
#include "mlunify/theory.hpp"

namespace mlu {

/// A subset of a carrier {0, ..., n-1}.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::size_t universe) : n_(universe), words_((universe + 63) / 64, 0) {}

  static Subset full(std::size_t universe) {
    Subset s(universe);
    for (auto& w : s.words_) w = ~std::uint64_t{0};
    s.trim();
    return s;
  }

  static Subset single(std::size_t universe, std::size_t e) {
    Subset s(universe);
    s.insert(e);
    return s;
  }

  std::size_t universe() const { return n_; }

  void insert(std::size_t e) { words_[e / 64] |= std::uint64_t{1} << (e % 64); }
  bool contains(std::size_t e) const { return e < n_ && (words_[e / 64] >> (e % 64)) & 1u; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }
  bool is_full() const { return count() == n_; }

  /// The only element, if the set is a singleton.
  std::optional<std::size_t> only() const {
    if (count() != 1) return std::nullopt;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
    }
    return std::nullopt;
  }

  Subset complement() const {
    Subset s = *this;
    for (auto& w : s.words_) w = ~w;
    s.trim();
    return s;
  }

  Subset& operator|=(const Subset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  Subset& operator&=(const Subset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  bool intersects(const Subset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & o.words_[i]) return true;
    }
    return false;
  }

  template <class F>
  void for_each(F f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      for (std::uint64_t w = words_[i]; w; w &= w - 1) f(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
    }
  }

  friend bool operator==(const Subset&, const Subset&) = default;

 private:
  void trim() {
    if (n_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

using Valuation = std::map<VarName, std::size_t>;

class FiniteModel {
 public:
  explicit FiniteModel(std::vector<std::string> element_names) : names_(std::move(element_names)) {
    if (names_.empty()) throw Error("a model needs a nonempty carrier");
    total_rows_ = Subset(names_.size());
  }

  std::size_t size() const { return names_.size(); }
  const std::string& element_name(std::size_t e) const { return names_.at(e); }
  Subset carrier() const { return Subset::full(size()); }
  Subset nothing() const { return Subset(size()); }

  void interpret(const std::string& symbol, Subset s) { interp_[symbol] = std::move(s); }

  Subset interp(const std::string& symbol) const {
    auto it = interp_.find(symbol);
    return it == interp_.end() ? nothing() : it->second;
  }

  /// Sets a · b. Unset pairs apply to the empty set.
  void set_app(std::size_t a, std::size_t b, Subset s) { app_[key(a, b)] = std::move(s); }

  /// Makes a · m the full carrier for every m.
  void set_total_row(std::size_t a) { total_rows_.insert(a); }

  Subset app(std::size_t a, std::size_t b) const {
    if (total_rows_.contains(a)) return carrier();
    auto it = app_.find(key(a, b));
    return it == app_.end() ? nothing() : it->second;
  }

  /// Pointwise extension: A · B is the union of a · b.
  Subset apply(const Subset& A, const Subset& B) const {
    if (B.empty() || A.empty()) return nothing();
    if (A.intersects(total_rows_)) return carrier();
    Subset out = nothing();
    A.for_each([&](std::size_t a) {
      B.for_each([&](std::size_t b) {
        auto it = app_.find(key(a, b));
        if (it != app_.end()) out |= it->second;
      });
    });
    return out;
  }

  /// Whether the definedness symbol is a singleton {d} with d · m = M for all m.
  bool conforms_to_definedness() const {
    auto d = interp(std::string(kDefinednessSymbol)).only();
    return d && total_rows_.contains(*d);
  }

  /// Element sizes for term models; empty for hand-built models. Used to prune
  /// valuation search.
  const std::vector<std::size_t>& element_sizes() const { return sizes_; }
  std::optional<std::size_t> size_bound() const { return bound_; }
  void set_size_info(std::vector<std::size_t> sizes, std::size_t bound) {
    sizes_ = std::move(sizes);
    bound_ = bound;
  }

  /// Carrier listing and application table, for debugging.
  std::string dump() const {
    std::string out = "carrier (" + std::to_string(size()) + "):\n";
    for (std::size_t i = 0; i < size(); ++i) out += "  " + std::to_string(i) + ": " + names_[i] + "\n";
    out += "symbols:\n";
    for (const auto& [s, set] : interp_) {
      out += "  " + s + " ->";
      set.for_each([&](std::size_t e) { out += " " + std::to_string(e); });
      out += "\n";
    }
    out += "application:\n";
    std::map<std::uint64_t, const Subset*> sorted;
    for (const auto& [k, v] : app_) sorted.emplace(k, &v);
    for (const auto& [k, v] : sorted) {
      out += "  " + std::to_string(k >> 32) + " . " + std::to_string(k & 0xffffffffu) + " ->";
      v->for_each([&](std::size_t e) { out += " " + std::to_string(e); });
      out += "\n";
    }
    total_rows_.for_each([&](std::size_t e) { out += "  " + std::to_string(e) + " . * -> carrier\n"; });
    return out;
  }

 private:
  static std::uint64_t key(std::size_t a, std::size_t b) { return (std::uint64_t(a) << 32) | std::uint64_t(b); }

  std::vector<std::string> names_;
  std::map<std::string, Subset> interp_;
  std::unordered_map<std::uint64_t, Subset> app_;
  Subset total_rows_;
  std::vector<std::size_t> sizes_;
  std::optional<std::size_t> bound_;
};

/// Ground applicative terms over the signature with at most `max_size` symbol
/// occurrences, respecting arities (partial applications included), plus the
/// definedness element. Symbols without an arity hint are nullary.
inline FiniteModel make_term_model(const Signature& sig, std::size_t max_size) {
  if (max_size == 0) throw Error("term model bound must be positive");
  struct Elem {
    std::string name;
    std::size_t size;
    unsigned remaining;
    bool compound;
  };
  std::vector<Elem> elems;
  bool has_constant = false;
  for (const auto& [name, arity] : sig.symbols()) {
    unsigned n = arity.value_or(0);
    has_constant = has_constant || n == 0;
    elems.push_back({name, 1, n, false});
  }
  if (!has_constant) throw Error("the signature has no nullary symbol, so the term model would be empty");

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
  for (std::size_t target = 2; target <= max_size; ++target) {
    const std::size_t existing = elems.size();
    for (std::size_t u = 0; u < existing; ++u) {
      if (elems[u].remaining == 0 || elems[u].size >= target) continue;
      for (std::size_t v = 0; v < existing; ++v) {
        if (elems[v].remaining != 0 || elems[u].size + elems[v].size != target) continue;
        const std::string arg = elems[v].compound ? "(" + elems[v].name + ")" : elems[v].name;
        table[{u, v}] = elems.size();
        elems.push_back({elems[u].name + " " + arg, target, elems[u].remaining - 1, true});
      }
    }
  }

  std::vector<std::string> names;
  std::vector<std::size_t> sizes;
  for (const auto& e : elems) {
    names.push_back(e.name);
    sizes.push_back(e.size);
  }
  const std::size_t d = elems.size();
  names.push_back("<def>");
  sizes.push_back(max_size + 1);

  FiniteModel m(std::move(names));
  const std::size_t n = m.size();
  std::size_t i = 0;
  for (const auto& [name, _] : sig.symbols()) m.interpret(name, Subset::single(n, i++));
  m.interpret(std::string(kDefinednessSymbol), Subset::single(n, d));
  m.set_total_row(d);
  for (const auto& [uv, r] : table) m.set_app(uv.first, uv.second, Subset::single(n, r));
  m.set_size_info(std::move(sizes), max_size);
  return m;
}

namespace detail {

inline Subset eval_in(const FiniteModel& m, Valuation& v, const Pattern& p) {
  using K = Pattern::Kind;
  switch (p.kind()) {
    case K::EVar: {
      auto it = v.find(p.name());
      if (it == v.end()) throw Error("valuation does not cover variable '" + p.name() + "'");
      return Subset::single(m.size(), it->second);
    }
    case K::Sym:
      return m.interp(p.name());
    case K::App:
      return m.apply(eval_in(m, v, p.left()), eval_in(m, v, p.right()));
    case K::Bot:
      return m.nothing();
    case K::Imp: {
      Subset out = eval_in(m, v, p.left()).complement();
      out |= eval_in(m, v, p.right());
      return out;
    }
    case K::Exists: {
      const VarName& x = p.name();
      auto saved = v.find(x) == v.end() ? std::nullopt : std::optional<std::size_t>(v[x]);
      Subset out = m.nothing();
      for (std::size_t e = 0; e < m.size() && !out.is_full(); ++e) {
        v[x] = e;
        out |= eval_in(m, v, p.body());
      }
      if (saved) {
        v[x] = *saved;
      } else {
        v.erase(x);
      }
      return out;
    }
  }
  return m.nothing();
}

}  // namespace detail

inline Subset eval(const FiniteModel& m, const Valuation& v, const Pattern& p) {
  Valuation copy = v;
  return detail::eval_in(m, copy, p);
}

struct Validity {
  bool valid = true;
  /// Valuations actually checked.
  std::size_t checked = 0;
  std::optional<Valuation> counterexample;
};

/// Maximal term subpatterns of `p` without the definedness symbol and without
/// bound variables. Used as guards: only valuations under which each guard is a
/// singleton are considered.
inline std::vector<Pattern> term_guards(const Pattern& p) {
  std::vector<Pattern> out;
  std::vector<VarName> bound;
  std::function<void(const Pattern&)> walk = [&](const Pattern& q) {
    using K = Pattern::Kind;
    if (q.is_term()) {
      bool has_ceil = false, has_bound = false;
      std::function<void(const Pattern&)> scan = [&](const Pattern& r) {
        if (is_definedness_symbol(r)) has_ceil = true;
        if (r.is(K::EVar) && std::find(bound.begin(), bound.end(), r.name()) != bound.end()) has_bound = true;
        if (r.is(K::App)) {
          scan(r.left());
          scan(r.right());
        }
      };
      scan(q);
      if (!has_ceil && !has_bound) {
        if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
        return;
      }
    }
    switch (q.kind()) {
      case K::App:
      case K::Imp:
        walk(q.left());
        walk(q.right());
        break;
      case K::Exists:
        bound.push_back(q.name());
        walk(q.body());
        bound.pop_back();
        break;
      default:
        break;
    }
  };
  walk(p);
  return out;
}

/// Checks that `p` evaluates to the carrier under every valuation of its free
/// variables that makes each guard a singleton.
inline Validity validate_within(const FiniteModel& m, const Pattern& p, const std::vector<Pattern>& guards) {
  VarSet fv = free_vars(p);
  for (const auto& g : guards) {
    for (const auto& x : free_vars(g)) fv.insert(x);
  }
  const std::vector<VarName> vars(fv.begin(), fv.end());
  const auto& sizes = m.element_sizes();
  const auto bound = m.size_bound();

  // Guards become checkable once all their variables are assigned.
  std::vector<std::vector<std::size_t>> ready(vars.size() + 1);
  std::vector<std::vector<std::size_t>> occurrences(guards.size(), std::vector<std::size_t>(vars.size(), 0));
  std::vector<std::size_t> symbol_leaves(guards.size(), 0);
  for (std::size_t g = 0; g < guards.size(); ++g) {
    std::size_t last = 0;
    std::function<void(const Pattern&)> scan = [&](const Pattern& r) {
      if (r.is(Pattern::Kind::EVar)) {
        auto k = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), r.name()) - vars.begin());
        ++occurrences[g][k];
        last = std::max(last, k + 1);
      } else if (r.is(Pattern::Kind::Sym)) {
        ++symbol_leaves[g];
      } else if (r.is(Pattern::Kind::App)) {
        scan(r.left());
        scan(r.right());
      }
    };
    scan(guards[g]);
    ready[last].push_back(g);
  }

  Validity out;
  Valuation val;
  std::vector<std::size_t> chosen(vars.size(), 0);

  auto guards_hold = [&](std::size_t level) {
    for (std::size_t g : ready[level]) {
      if (!eval(m, val, guards[g]).only()) return false;
    }
    return true;
  };
  // Lower bound on the size of every compound guard given the assigned prefix.
  auto size_ok = [&](std::size_t assigned) {
    if (!bound || sizes.empty()) return true;
    for (std::size_t g = 0; g < guards.size(); ++g) {
      if (!guards[g].is(Pattern::Kind::App)) continue;
      std::size_t total = symbol_leaves[g];
      for (std::size_t k = 0; k < vars.size(); ++k) total += occurrences[g][k] * (k < assigned ? sizes[chosen[k]] : 1);
      if (total > *bound) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
    if (k == vars.size()) {
      ++out.checked;
      if (!eval(m, val, p).is_full()) {
        out.valid = false;
        out.counterexample = val;
        return false;
      }
      return true;
    }
    for (std::size_t e = 0; e < m.size(); ++e) {
      chosen[k] = e;
      val[vars[k]] = e;
      if (!size_ok(k + 1) || !guards_hold(k + 1)) continue;
      if (!go(k + 1)) return false;
    }
    val.erase(vars[k]);
    return true;
  };
  if (guards_hold(0)) go(0);
  return out;
}

/// Checks every valuation of the free variables.
inline Validity validate(const FiniteModel& m, const Pattern& p) { return validate_within(m, p, {}); }

inline bool validates(const FiniteModel& m, const Pattern& p) { return validate(m, p).valid; }

}  // namespace mlu
