#pragma once

// MSO formulas over labelled linear orders: syntax tree, parser, printer and
// structural analyses (quantifier rank, free variables, renaming, order cases).

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chainrep/error.hpp"

namespace chainrep {

// ---------------------------------------------------------------------------
// Signature

struct Signature {
  std::vector<std::string> predicates;

  Signature() = default;
  explicit Signature(std::vector<std::string> names) : predicates(std::move(names)) { validate(); }

  // P1..Pk
  static Signature numbered(std::size_t k) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= k; ++i) names.push_back("P" + std::to_string(i));
    return Signature(std::move(names));
  }

  // Parses "P1,P2" (empty string gives the empty signature).
  static Signature parse(std::string_view text) {
    std::vector<std::string> names;
    std::string cur;
    for (char c : text) {
      if (c == ',') {
        names.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        cur += c;
      }
    }
    if (!cur.empty() || !names.empty()) names.push_back(cur);
    return Signature(std::move(names));
  }

  std::size_t size() const noexcept { return predicates.size(); }
  std::size_t alphabet_size() const noexcept { return std::size_t{1} << predicates.size(); }

  // Index of a predicate name, or size() when absent.
  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < predicates.size(); ++i)
      if (predicates[i] == name) return i;
    return predicates.size();
  }

  void validate() const {
    if (predicates.size() > 16) throw InputError("signature: at most 16 predicates supported");
    std::set<std::string> seen;
    for (const auto& p : predicates) {
      if (p.empty()) throw InputError("signature: empty predicate name");
      if (!(std::isalpha(static_cast<unsigned char>(p[0])) || p[0] == '_'))
        throw InputError("signature: predicate name must start with a letter: " + p);
      for (char c : p)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
          throw InputError("signature: bad character in predicate name: " + p);
      if (!seen.insert(p).second) throw InputError("signature: duplicate predicate " + p);
    }
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < predicates.size(); ++i) {
      if (i) out += ',';
      out += predicates[i];
    }
    return out;
  }

  friend bool operator==(const Signature&, const Signature&) = default;
};

// ---------------------------------------------------------------------------
// Syntax tree

enum class Op : std::uint8_t {
  True,
  False,
  Less,      // var < var2
  Equal,     // var = var2
  Pred,      // P[pred](var)
  In,        // var2(var), var2 a set variable
  Not,
  And,
  Or,
  Implies,
  ExistsFO,  // ex var. lhs
  ForallFO,
  ExistsSO,
  ForallSO,
  AtLeast,   // atleast count var. lhs
};

inline bool is_quantifier(Op op) {
  return op == Op::ExistsFO || op == Op::ForallFO || op == Op::ExistsSO || op == Op::ForallSO ||
         op == Op::AtLeast;
}
inline bool is_binary(Op op) { return op == Op::And || op == Op::Or || op == Op::Implies; }
inline bool binds_set(Op op) { return op == Op::ExistsSO || op == Op::ForallSO; }

inline bool is_fo_name(std::string_view v) {
  return !v.empty() && std::islower(static_cast<unsigned char>(v[0]));
}
inline bool is_so_name(std::string_view v) {
  return !v.empty() && std::isupper(static_cast<unsigned char>(v[0]));
}

class Formula {
 public:
  struct Node;

  Formula();  // true
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const noexcept { return *node_; }
  Op op() const noexcept;
  const Node* operator->() const noexcept { return node_.get(); }
  const void* identity() const noexcept { return node_.get(); }

 private:
  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  Op op = Op::True;
  std::string var;
  std::string var2;
  std::size_t pred = 0;
  std::size_t count = 0;
  Formula lhs;  // only meaningful for Not, binary, quantifiers
  Formula rhs;  // only meaningful for binary
  // Leaf nodes hold default children; avoid infinite recursion by sharing one true node.
  Node() : lhs(nullptr_tag()), rhs(nullptr_tag()) {}

 private:
  friend class Formula;
  static Formula nullptr_tag() { return Formula(std::shared_ptr<const Node>{}); }
};

namespace detail {
inline const std::shared_ptr<const Formula::Node>& true_node() {
  static const std::shared_ptr<const Formula::Node> node = std::make_shared<const Formula::Node>();
  return node;
}
inline Formula make(Formula::Node n) { return Formula(std::make_shared<const Formula::Node>(std::move(n))); }
}  // namespace detail

inline Formula::Formula() : node_(detail::true_node()) {}
inline Op Formula::op() const noexcept { return node_->op; }

// Constructors.
inline Formula truth() { return Formula(); }
inline Formula falsity() {
  Formula::Node n;
  n.op = Op::False;
  return detail::make(std::move(n));
}
inline Formula less(std::string x, std::string y) {
  Formula::Node n;
  n.op = Op::Less;
  n.var = std::move(x);
  n.var2 = std::move(y);
  return detail::make(std::move(n));
}
inline Formula equal(std::string x, std::string y) {
  Formula::Node n;
  n.op = Op::Equal;
  n.var = std::move(x);
  n.var2 = std::move(y);
  return detail::make(std::move(n));
}
// Predicate by 0-based signature index.
inline Formula pred(std::size_t index, std::string x) {
  Formula::Node n;
  n.op = Op::Pred;
  n.pred = index;
  n.var = std::move(x);
  return detail::make(std::move(n));
}
inline Formula member(std::string set, std::string x) {
  Formula::Node n;
  n.op = Op::In;
  n.var = std::move(x);
  n.var2 = std::move(set);
  return detail::make(std::move(n));
}
inline Formula negate(Formula f) {
  Formula::Node n;
  n.op = Op::Not;
  n.lhs = std::move(f);
  return detail::make(std::move(n));
}
inline Formula binary(Op op, Formula a, Formula b) {
  Formula::Node n;
  n.op = op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return detail::make(std::move(n));
}
inline Formula conj(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
inline Formula disj(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
inline Formula implies(Formula a, Formula b) { return binary(Op::Implies, std::move(a), std::move(b)); }
inline Formula quantify(Op op, std::string v, Formula body) {
  Formula::Node n;
  n.op = op;
  n.var = std::move(v);
  n.lhs = std::move(body);
  return detail::make(std::move(n));
}
inline Formula exists_fo(std::string v, Formula body) { return quantify(Op::ExistsFO, std::move(v), std::move(body)); }
inline Formula forall_fo(std::string v, Formula body) { return quantify(Op::ForallFO, std::move(v), std::move(body)); }
inline Formula exists_so(std::string v, Formula body) { return quantify(Op::ExistsSO, std::move(v), std::move(body)); }
inline Formula forall_so(std::string v, Formula body) { return quantify(Op::ForallSO, std::move(v), std::move(body)); }
inline Formula at_least(std::size_t count, std::string v, Formula body) {
  Formula::Node n;
  n.op = Op::AtLeast;
  n.count = count;
  n.var = std::move(v);
  n.lhs = std::move(body);
  return detail::make(std::move(n));
}

// Left-nested conjunction/disjunction; empty lists give true/false.
inline Formula conj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return truth();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(acc, parts[i]);
  return acc;
}
inline Formula disj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return falsity();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = disj(acc, parts[i]);
  return acc;
}
inline Formula exists_all(const std::vector<std::string>& vars, Formula body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    body = is_so_name(*it) ? exists_so(*it, body) : exists_fo(*it, body);
  return body;
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.identity() == b.identity()) return true;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::True:
    case Op::False:
      return true;
    case Op::Less:
    case Op::Equal:
    case Op::In:
      return x.var == y.var && x.var2 == y.var2;
    case Op::Pred:
      return x.pred == y.pred && x.var == y.var;
    case Op::Not:
      return x.lhs == y.lhs;
    case Op::And:
    case Op::Or:
    case Op::Implies:
      return x.lhs == y.lhs && x.rhs == y.rhs;
    case Op::AtLeast:
      return x.count == y.count && x.var == y.var && x.lhs == y.lhs;
    default:
      return x.var == y.var && x.lhs == y.lhs;
  }
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {
inline void render_into(const Formula& f, const Signature& sig, std::string& out) {
  const auto& n = f.node();
  auto child = [&](const Formula& c) {
    // A quantifier (possibly negated) on the left of a binary connective would swallow the right operand.
    const Formula* head = &c;
    while (head->op() == Op::Not) head = &head->node().lhs;
    if (is_quantifier(head->op())) {
      out += '(';
      render_into(c, sig, out);
      out += ')';
    } else {
      render_into(c, sig, out);
    }
  };
  switch (n.op) {
    case Op::True:
      out += "true";
      break;
    case Op::False:
      out += "false";
      break;
    case Op::Less:
      out += n.var + "<" + n.var2;
      break;
    case Op::Equal:
      out += n.var + "=" + n.var2;
      break;
    case Op::Pred:
      out += (n.pred < sig.size() ? sig.predicates[n.pred] : "P" + std::to_string(n.pred + 1));
      out += "(" + n.var + ")";
      break;
    case Op::In:
      out += n.var2 + "(" + n.var + ")";
      break;
    case Op::Not:
      out += '~';
      render_into(n.lhs, sig, out);
      break;
    case Op::And:
    case Op::Or:
    case Op::Implies:
      out += '(';
      child(n.lhs);
      out += n.op == Op::And ? " & " : n.op == Op::Or ? " | " : " -> ";
      render_into(n.rhs, sig, out);
      out += ')';
      break;
    case Op::ExistsFO:
      out += "ex " + n.var + ". ";
      render_into(n.lhs, sig, out);
      break;
    case Op::ForallFO:
      out += "all " + n.var + ". ";
      render_into(n.lhs, sig, out);
      break;
    case Op::ExistsSO:
      out += "EX " + n.var + ". ";
      render_into(n.lhs, sig, out);
      break;
    case Op::ForallSO:
      out += "ALL " + n.var + ". ";
      render_into(n.lhs, sig, out);
      break;
    case Op::AtLeast:
      out += "atleast " + std::to_string(n.count) + " " + n.var + ". ";
      render_into(n.lhs, sig, out);
      break;
  }
}
}  // namespace detail

inline std::string render(const Formula& f, const Signature& sig) {
  std::string out;
  detail::render_into(f, sig, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
//
//   impl   := disj ('->' impl)?
//   disj   := conj ('|' conj)*
//   conj   := unary ('&' unary)*
//   unary  := '~' unary | quant | atom | '(' impl ')'
//   quant  := ('ex'|'all') fo '.' impl | ('EX'|'ALL') SO '.' impl | 'atleast' N fo '.' impl
//   atom   := fo '<' fo | fo '=' fo | Pred '(' fo ')' | SO '(' fo ')' | 'true' | 'false'

namespace detail {
class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

  Formula parse() {
    Formula f = parse_impl();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  std::string peek_ident() {
    skip_ws();
    std::size_t p = pos_;
    if (p >= text_.size() || !ident_start(text_[p])) return {};
    while (p < text_.size() && ident_char(text_[p])) ++p;
    return std::string(text_.substr(pos_, p - pos_));
  }
  std::string ident() {
    std::string id = peek_ident();
    if (id.empty()) fail("expected identifier");
    pos_ += id.size();
    return id;
  }
  static bool keyword(const std::string& id) {
    return id == "ex" || id == "all" || id == "EX" || id == "ALL" || id == "atleast" || id == "true" ||
           id == "false";
  }
  std::string fo_var() {
    std::size_t start = pos_;
    std::string v = ident();
    if (keyword(v)) {
      pos_ = start;
      fail("keyword '" + v + "' used as variable");
    }
    if (!is_fo_name(v)) {
      pos_ = start;
      fail("variable order mismatch: '" + v + "' is a set variable used as an element variable");
    }
    return v;
  }
  std::string so_var() {
    std::size_t start = pos_;
    std::string v = ident();
    if (!is_so_name(v) || keyword(v)) {
      pos_ = start;
      fail("variable order mismatch: '" + v + "' is not a set variable");
    }
    if (sig_.index_of(v) < sig_.size()) {
      pos_ = start;
      fail("'" + v + "' is a predicate of the signature, not a set variable");
    }
    return v;
  }

  Formula parse_impl() {
    Formula lhs = parse_disj();
    if (accept("->")) return implies(lhs, parse_impl());
    return lhs;
  }
  Formula parse_disj() {
    Formula acc = parse_conj();
    while (accept("|")) acc = disj(acc, parse_conj());
    return acc;
  }
  Formula parse_conj() {
    Formula acc = parse_unary();
    while (accept("&")) acc = conj(acc, parse_unary());
    return acc;
  }
  Formula parse_unary() {
    if (at_end()) fail("unexpected end of input");
    if (accept("~")) return negate(parse_unary());
    if (accept("(")) {
      Formula f = parse_impl();
      expect(")");
      return f;
    }
    std::string id = peek_ident();
    if (id.empty()) fail("expected formula");
    if (id == "ex" || id == "all" || id == "EX" || id == "ALL" || id == "atleast") {
      pos_ += id.size();
      std::size_t count = 0;
      if (id == "atleast") {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected count after 'atleast'");
        count = std::stoul(std::string(text_.substr(start, pos_ - start)));
      }
      std::string v = (id == "EX" || id == "ALL") ? so_var() : fo_var();
      expect(".");
      if (at_end()) fail("missing quantifier body");
      Formula body = parse_impl();
      if (id == "ex") return exists_fo(v, body);
      if (id == "all") return forall_fo(v, body);
      if (id == "EX") return exists_so(v, body);
      if (id == "ALL") return forall_so(v, body);
      return at_least(count, v, body);
    }
    if (id == "true") {
      pos_ += id.size();
      return truth();
    }
    if (id == "false") {
      pos_ += id.size();
      return falsity();
    }
    return parse_atom();
  }
  Formula parse_atom() {
    std::size_t start = pos_;
    std::string id = ident();
    if (accept("(")) {
      std::string x = fo_var();
      expect(")");
      std::size_t p = sig_.index_of(id);
      if (p < sig_.size()) return pred(p, x);
      if (is_so_name(id)) return member(id, x);
      pos_ = start;
      fail("unknown predicate '" + id + "'");
    }
    if (!is_fo_name(id)) {
      pos_ = start;
      fail("variable order mismatch: '" + id + "' used as an element variable");
    }
    if (accept("<")) return less(id, fo_var());
    if (accept("=")) return equal(id, fo_var());
    fail("expected '<' or '=' after '" + id + "'");
  }

  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};
}  // namespace detail

inline Formula parse(std::string_view text, const Signature& sig) { return detail::Parser(text, sig).parse(); }

// ---------------------------------------------------------------------------
// Analyses

inline std::size_t quantifier_rank(const Formula& f) {
  const auto& n = f.node();
  switch (n.op) {
    case Op::Not:
      return quantifier_rank(n.lhs);
    case Op::And:
    case Op::Or:
    case Op::Implies:
      return std::max(quantifier_rank(n.lhs), quantifier_rank(n.rhs));
    case Op::ExistsFO:
    case Op::ForallFO:
    case Op::ExistsSO:
    case Op::ForallSO:
      return 1 + quantifier_rank(n.lhs);
    case Op::AtLeast:
      // rank of the expansion into `count` nested existentials
      return n.count == 0 ? 0 : n.count + quantifier_rank(n.lhs);
    default:
      return 0;
  }
}

struct FreeVariables {
  std::vector<std::string> fo;
  std::vector<std::string> so;
};

namespace detail {
inline void collect_free(const Formula& f, std::vector<std::string>& bound, FreeVariables& out) {
  const auto& n = f.node();
  auto note = [&](const std::string& v, std::vector<std::string>& into) {
    if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
    if (std::find(into.begin(), into.end(), v) == into.end()) into.push_back(v);
  };
  switch (n.op) {
    case Op::Less:
    case Op::Equal:
      note(n.var, out.fo);
      note(n.var2, out.fo);
      break;
    case Op::Pred:
      note(n.var, out.fo);
      break;
    case Op::In:
      note(n.var2, out.so);
      note(n.var, out.fo);
      break;
    case Op::Not:
      collect_free(n.lhs, bound, out);
      break;
    case Op::And:
    case Op::Or:
    case Op::Implies:
      collect_free(n.lhs, bound, out);
      collect_free(n.rhs, bound, out);
      break;
    case Op::ExistsFO:
    case Op::ForallFO:
    case Op::ExistsSO:
    case Op::ForallSO:
    case Op::AtLeast:
      bound.push_back(n.var);
      collect_free(n.lhs, bound, out);
      bound.pop_back();
      break;
    default:
      break;
  }
}

inline void collect_names(const Formula& f, std::set<std::string>& out) {
  const auto& n = f.node();
  if (!n.var.empty()) out.insert(n.var);
  if (!n.var2.empty()) out.insert(n.var2);
  if (n.op == Op::Not || is_quantifier(n.op) || is_binary(n.op)) collect_names(n.lhs, out);
  if (is_binary(n.op)) collect_names(n.rhs, out);
}
}  // namespace detail

// Free variables in first-occurrence order (left to right).
inline FreeVariables free_variables(const Formula& f) {
  FreeVariables out;
  std::vector<std::string> bound;
  detail::collect_free(f, bound, out);
  return out;
}

// Every variable name occurring in f, free or bound.
inline std::set<std::string> variable_names(const Formula& f) {
  std::set<std::string> out;
  detail::collect_names(f, out);
  return out;
}

inline std::size_t formula_size(const Formula& f) {
  const auto& n = f.node();
  std::size_t s = 1;
  if (n.op == Op::Not || is_quantifier(n.op) || is_binary(n.op)) s += formula_size(n.lhs);
  if (is_binary(n.op)) s += formula_size(n.rhs);
  return s;
}

// Highest predicate index used plus one.
inline std::size_t predicate_span(const Formula& f) {
  const auto& n = f.node();
  std::size_t s = n.op == Op::Pred ? n.pred + 1 : 0;
  if (n.op == Op::Not || is_quantifier(n.op) || is_binary(n.op)) s = std::max(s, predicate_span(n.lhs));
  if (is_binary(n.op)) s = std::max(s, predicate_span(n.rhs));
  return s;
}

// Deterministic supply of fresh variable names: base followed by the smallest
// unused numeric suffix. Case of the base (element vs set variable) is kept.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(std::set<std::string> used) : used_(std::move(used)) {}

  void reserve(const std::string& name) { used_.insert(name); }
  void reserve(const Formula& f) {
    auto names = variable_names(f);
    used_.insert(names.begin(), names.end());
  }
  bool used(const std::string& name) const { return used_.count(name) != 0; }

  std::string fresh(std::string base) {
    while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
    if (base.empty()) base = "v";
    for (std::size_t i = 1;; ++i) {
      std::string cand = base + std::to_string(i);
      if (used_.insert(cand).second) return cand;
    }
  }

 private:
  std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Capture-avoiding renaming of free variables.
//
// The renaming must be injective on the free variables of f unless allow_merge
// is set (merging is how order cases identify equal variables). Bound variables
// that would capture a substituted name are freshened first.

namespace detail {
inline Formula rename_rec(const Formula& f, const std::map<std::string, std::string>& ren, NameSupply& names) {
  const auto& n = f.node();
  auto look = [&](const std::string& v) {
    auto it = ren.find(v);
    return it == ren.end() ? v : it->second;
  };
  switch (n.op) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Less:
      return less(look(n.var), look(n.var2));
    case Op::Equal:
      return equal(look(n.var), look(n.var2));
    case Op::Pred:
      return pred(n.pred, look(n.var));
    case Op::In:
      return member(look(n.var2), look(n.var));
    case Op::Not:
      return negate(rename_rec(n.lhs, ren, names));
    case Op::And:
    case Op::Or:
    case Op::Implies:
      return binary(n.op, rename_rec(n.lhs, ren, names), rename_rec(n.rhs, ren, names));
    default: {
      std::map<std::string, std::string> inner = ren;
      inner.erase(n.var);
      // Would the bound variable capture one of the substituted names?
      bool capture = false;
      auto free_body = free_variables(n.lhs);
      for (const auto& [from, to] : inner) {
        if (to != n.var) continue;
        bool occurs = std::find(free_body.fo.begin(), free_body.fo.end(), from) != free_body.fo.end() ||
                      std::find(free_body.so.begin(), free_body.so.end(), from) != free_body.so.end();
        if (occurs) capture = true;
      }
      std::string bv = n.var;
      if (capture) {
        bv = names.fresh(n.var);
        inner[n.var] = bv;
      }
      Formula body = rename_rec(n.lhs, inner, names);
      if (n.op == Op::AtLeast) return at_least(n.count, bv, body);
      return quantify(n.op, bv, body);
    }
  }
}
}  // namespace detail

inline Formula substitute(const Formula& f, const std::map<std::string, std::string>& renaming,
                          bool allow_merge = false) {
  auto fv = free_variables(f);
  std::vector<std::string> all_free = fv.fo;
  all_free.insert(all_free.end(), fv.so.begin(), fv.so.end());
  for (const auto& [from, to] : renaming) {
    if (is_fo_name(from) != is_fo_name(to) || to.empty())
      throw PreconditionError("substitute: renaming " + from + " -> " + to + " changes variable order");
  }
  if (!allow_merge) {
    std::map<std::string, std::string> image;
    for (const auto& v : all_free) {
      auto it = renaming.find(v);
      std::string target = it == renaming.end() ? v : it->second;
      auto [pos, inserted] = image.emplace(target, v);
      if (!inserted)
        throw PreconditionError("substitute: renaming is not injective on free variables (" + pos->second +
                                ", " + v + " -> " + target + ")");
    }
  }
  NameSupply names;
  names.reserve(f);
  for (const auto& [from, to] : renaming) {
    names.reserve(from);
    names.reserve(to);
  }
  return detail::rename_rec(f, renaming, names);
}

// ---------------------------------------------------------------------------
// Constant folding: removes true/false, x<x, x=x and double negation.

inline Formula simplify(const Formula& f) {
  const auto& n = f.node();
  switch (n.op) {
    case Op::Less:
      return n.var == n.var2 ? falsity() : f;
    case Op::Equal:
      return n.var == n.var2 ? truth() : f;
    case Op::Not: {
      Formula c = simplify(n.lhs);
      if (c.op() == Op::True) return falsity();
      if (c.op() == Op::False) return truth();
      if (c.op() == Op::Not) return c->lhs;
      return negate(c);
    }
    case Op::And: {
      Formula a = simplify(n.lhs), b = simplify(n.rhs);
      if (a.op() == Op::False || b.op() == Op::False) return falsity();
      if (a.op() == Op::True) return b;
      if (b.op() == Op::True) return a;
      return conj(a, b);
    }
    case Op::Or: {
      Formula a = simplify(n.lhs), b = simplify(n.rhs);
      if (a.op() == Op::True || b.op() == Op::True) return truth();
      if (a.op() == Op::False) return b;
      if (b.op() == Op::False) return a;
      return disj(a, b);
    }
    case Op::Implies: {
      Formula a = simplify(n.lhs), b = simplify(n.rhs);
      if (a.op() == Op::False || b.op() == Op::True) return truth();
      if (a.op() == Op::True) return b;
      if (b.op() == Op::False) return simplify(negate(a));
      return implies(a, b);
    }
    case Op::ExistsSO:
    case Op::ForallSO: {
      Formula b = simplify(n.lhs);
      // Set quantifiers range over a nonempty powerset, so a constant body stays constant.
      if (b.op() == Op::True || b.op() == Op::False) return b;
      return quantify(n.op, n.var, b);
    }
    case Op::ExistsFO:
    case Op::ForallFO:
      // Element quantifiers are not folded: over the empty word ex x. true is false.
      return quantify(n.op, n.var, simplify(n.lhs));
    case Op::AtLeast:
      if (n.count == 0) return truth();
      return at_least(n.count, n.var, simplify(n.lhs));
    default:
      return f;
  }
}

// Conjuncts of a left- or right-nested conjunction, left to right.
inline std::vector<Formula> top_conjuncts(const Formula& f) {
  if (f.op() != Op::And) return {f};
  auto out = top_conjuncts(f->lhs);
  auto rhs = top_conjuncts(f->rhs);
  out.insert(out.end(), rhs.begin(), rhs.end());
  return out;
}

// f without the top-level conjuncts structurally equal to c.
inline Formula drop_conjunct(const Formula& f, const Formula& c) {
  std::vector<Formula> kept;
  for (const auto& part : top_conjuncts(f))
    if (!(part == c)) kept.push_back(part);
  return conj_all(kept);
}

// ---------------------------------------------------------------------------
// Macro layer

// x1 < x2 < ... < xk
inline Formula ascending(const std::vector<std::string>& vars) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i + 1 < vars.size(); ++i) parts.push_back(less(vars[i], vars[i + 1]));
  return conj_all(parts);
}

// Pairwise inequality of two element tuples read left to right (lexicographic, strict).
inline Formula lex_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) throw PreconditionError("lex_less: tuple length mismatch");
  std::vector<Formula> cases;
  for (std::size_t j = 0; j < a.size(); ++j) {
    std::vector<Formula> parts;
    for (std::size_t l = 0; l < j; ++l) parts.push_back(equal(a[l], b[l]));
    parts.push_back(less(a[j], b[j]));
    cases.push_back(conj_all(parts));
  }
  return disj_all(cases);
}

inline Formula tuple_equal(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) throw PreconditionError("tuple_equal: tuple length mismatch");
  std::vector<Formula> parts;
  for (std::size_t j = 0; j < a.size(); ++j) parts.push_back(equal(a[j], b[j]));
  return conj_all(parts);
}

// "xs is the i-th tuple (1-based, lexicographic) among those satisfying theta(xs)".
// theta's free variables other than xs are parameters.
inline Formula nth_lex(const Formula& theta, const std::vector<std::string>& xs, std::size_t i, NameSupply& names) {
  if (i == 0) throw PreconditionError("nth_lex: index is 1-based");
  auto copy_vars = [&](const std::vector<std::string>& vs) {
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(names.fresh(v));
    return out;
  };
  auto rename_to = [&](const std::vector<std::string>& to) {
    std::map<std::string, std::string> ren;
    for (std::size_t j = 0; j < xs.size(); ++j) ren[xs[j]] = to[j];
    return substitute(theta, ren);
  };
  if (i == 1) {
    auto prev = copy_vars(xs);
    return conj(theta, negate(exists_all(prev, conj(rename_to(prev), lex_less(prev, xs)))));
  }
  auto prev = copy_vars(xs);
  auto mid = copy_vars(xs);
  std::map<std::string, std::string> to_prev;
  for (std::size_t j = 0; j < xs.size(); ++j) to_prev[xs[j]] = prev[j];
  Formula prev_is_nth = substitute(nth_lex(theta, xs, i - 1, names), to_prev);
  Formula gap = negate(exists_all(mid, conj_all({rename_to(mid), lex_less(prev, mid), lex_less(mid, xs)})));
  return conj(theta, exists_all(prev, conj_all({prev_is_nth, lex_less(prev, xs), gap})));
}

// "xs is the lexicographically least tuple satisfying theta".
inline Formula lex_min(const Formula& theta, const std::vector<std::string>& xs, NameSupply& names) {
  return nth_lex(theta, xs, 1, names);
}

// Replace counting quantifiers by nested existentials over strictly increasing witnesses.
inline Formula expand_macros(const Formula& f) {
  const auto& n = f.node();
  switch (n.op) {
    case Op::Not:
      return negate(expand_macros(n.lhs));
    case Op::And:
    case Op::Or:
    case Op::Implies:
      return binary(n.op, expand_macros(n.lhs), expand_macros(n.rhs));
    case Op::ExistsFO:
    case Op::ForallFO:
    case Op::ExistsSO:
    case Op::ForallSO:
      return quantify(n.op, n.var, expand_macros(n.lhs));
    case Op::AtLeast: {
      if (n.count == 0) return truth();
      Formula body = expand_macros(n.lhs);
      NameSupply names;
      names.reserve(body);
      names.reserve(n.var);
      std::vector<std::string> ws;
      std::vector<Formula> parts;
      for (std::size_t i = 0; i < n.count; ++i) ws.push_back(names.fresh(n.var));
      parts.push_back(ascending(ws));
      for (const auto& w : ws) parts.push_back(substitute(body, {{n.var, w}}));
      return exists_all(ws, conj_all(parts));
    }
    default:
      return f;
  }
}

// ---------------------------------------------------------------------------
// Order cases

struct VariableOrderCase {
  // Equality classes in strictly ascending order; each class lists variables in
  // free-variable order and its first member is the representative.
  std::vector<std::vector<std::string>> classes;

  std::vector<std::string> representatives() const {
    std::vector<std::string> out;
    for (const auto& c : classes) out.push_back(c.front());
    return out;
  }
  // The case constraint over the original variables.
  Formula constraint() const {
    std::vector<Formula> parts;
    for (const auto& c : classes)
      for (std::size_t i = 1; i < c.size(); ++i) parts.push_back(equal(c[i], c.front()));
    for (std::size_t i = 0; i + 1 < classes.size(); ++i)
      parts.push_back(less(classes[i].front(), classes[i + 1].front()));
    return conj_all(parts);
  }
  std::string describe() const {
    std::string out;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (i) out += " < ";
      for (std::size_t j = 0; j < classes[i].size(); ++j) {
        if (j) out += "=";
        out += classes[i][j];
      }
    }
    return out.empty() ? "()" : out;
  }
};

struct OrderCase {
  VariableOrderCase order;
  Formula formula;  // over order.representatives(), guarded by their ascending order
};

// One entry per weak ordering of the given element variables (default: free
// FO variables of f in first-occurrence order). Entries are listed by the
// rank vector (class index of each variable) in lexicographic order.
inline std::vector<OrderCase> order_case_split(const Formula& f, std::vector<std::string> vars = {}) {
  if (vars.empty()) vars = free_variables(f).fo;
  const std::size_t k = vars.size();
  std::vector<OrderCase> out;
  std::vector<std::size_t> rank(k, 0);
  auto emit = [&]() {
    std::size_t classes = 0;
    for (auto r : rank) classes = std::max(classes, r + 1);
    std::vector<bool> used(classes, false);
    for (auto r : rank) used[r] = true;
    if (std::find(used.begin(), used.end(), false) != used.end()) return;
    VariableOrderCase oc;
    oc.classes.resize(classes);
    for (std::size_t i = 0; i < k; ++i) oc.classes[rank[i]].push_back(vars[i]);
    std::map<std::string, std::string> merge;
    for (const auto& c : oc.classes)
      for (std::size_t i = 1; i < c.size(); ++i) merge[c[i]] = c.front();
    Formula merged = simplify(substitute(f, merge, true));
    std::vector<Formula> parts{merged};
    auto present = top_conjuncts(merged);
    auto reps = oc.representatives();
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
      Formula step = less(reps[i], reps[i + 1]);
      if (std::find(present.begin(), present.end(), step) == present.end()) parts.push_back(step);
    }
    Formula guarded = simplify(conj_all(parts));
    out.push_back({std::move(oc), guarded});
  };
  if (k == 0) {
    out.push_back({VariableOrderCase{}, f});
    return out;
  }
  // Enumerate rank vectors with entries < k in lexicographic order.
  while (true) {
    emit();
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (rank[i] + 1 < k) {
        ++rank[i];
        for (std::size_t j = i + 1; j < k; ++j) rank[j] = 0;
        break;
      }
      if (i == 0) return out;
    }
  }
}

}  // namespace chainrep
