#ifndef CHCTA_TERM_HPP
#define CHCTA_TERM_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace chcta {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Sort identifier. Bool, Int and Real are interpreted; `(Array I E)` is
/// understood by select/store; every other sort is carried opaquely.
class Sort {
 public:
  explicit Sort(std::string name, std::vector<Sort> params = {});

  static Sort boolean();
  static Sort integer();
  static Sort real();
  static Sort array(Sort index, Sort element);

  const std::string& name() const { return name_; }
  const std::vector<Sort>& params() const { return params_; }

  bool is_bool() const { return params_.empty() && name_ == "Bool"; }
  bool is_int() const { return params_.empty() && name_ == "Int"; }
  bool is_real() const { return params_.empty() && name_ == "Real"; }
  bool is_numeric() const { return is_int() || is_real(); }
  bool is_array() const { return name_ == "Array" && params_.size() == 2; }
  /// Not interpreted by the library; must be declared to the solver.
  bool is_opaque() const;

  std::string to_string() const;

  friend bool operator==(const Sort&, const Sort&) = default;
  friend auto operator<=>(const Sort&, const Sort&) = default;

 private:
  std::string name_;
  std::vector<Sort> params_;
};

std::ostream& operator<<(std::ostream& os, const Sort& sort);

enum class TermKind { Variable, BoolConst, IntConst, RealConst, Apply, Forall, Exists };

class Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable term node. Build with the mk_* factories below, which check
/// sorts; the constructor performs no validation.
class Term {
 public:
  Term(TermKind kind, Sort sort, std::string name, std::vector<TermPtr> args,
       std::vector<TermPtr> bound, Rational value);

  TermKind kind() const { return kind_; }
  const Sort& sort() const { return sort_; }
  /// Variable name or applied function symbol.
  const std::string& name() const { return name_; }
  /// Application arguments; for quantifiers the single body.
  const std::vector<TermPtr>& args() const { return args_; }
  /// Bound variables of a quantifier.
  const std::vector<TermPtr>& bound() const { return bound_; }
  const TermPtr& body() const { return args_.front(); }
  const Rational& value() const { return value_; }

  bool is_var() const { return kind_ == TermKind::Variable; }
  bool is_app() const { return kind_ == TermKind::Apply; }
  bool is_app(std::string_view op) const { return kind_ == TermKind::Apply && name_ == op; }
  bool is_quantifier() const { return kind_ == TermKind::Forall || kind_ == TermKind::Exists; }
  bool is_literal() const {
    return kind_ == TermKind::BoolConst || kind_ == TermKind::IntConst ||
           kind_ == TermKind::RealConst;
  }
  bool is_true() const { return kind_ == TermKind::BoolConst && value_ != 0; }
  bool is_false() const { return kind_ == TermKind::BoolConst && value_ == 0; }

 private:
  TermKind kind_;
  Sort sort_;
  std::string name_;
  std::vector<TermPtr> args_;
  std::vector<TermPtr> bound_;
  Rational value_;
};

TermPtr mk_var(std::string name, Sort sort);
TermPtr mk_bool(bool value);
TermPtr mk_true();
TermPtr mk_false();
TermPtr mk_int(Integer value);
TermPtr mk_real(Rational value);

/// Application of an interpreted symbol. Throws SortError on an unknown
/// symbol or ill-sorted arguments.
TermPtr mk_app(std::string op, std::vector<TermPtr> args);
/// Application of an uninterpreted (declared) function with the given range.
TermPtr mk_uf_app(std::string op, std::vector<TermPtr> args, Sort range);
TermPtr mk_forall(std::vector<TermPtr> vars, TermPtr body);
TermPtr mk_exists(std::vector<TermPtr> vars, TermPtr body);

// Convenience builders. mk_and/mk_or accept zero or one operand.
TermPtr mk_and(std::vector<TermPtr> args);
TermPtr mk_or(std::vector<TermPtr> args);
TermPtr mk_not(TermPtr arg);
TermPtr mk_implies(TermPtr lhs, TermPtr rhs);
TermPtr mk_eq(TermPtr lhs, TermPtr rhs);

bool is_builtin_symbol(std::string_view op);
/// True for SMT-LIB symbols that may appear unquoted.
bool is_simple_symbol(std::string_view name);
/// Prints `name` as an SMT-LIB symbol, quoting with |..| when required.
std::string quote_symbol(std::string_view name);

std::string to_smtlib(const Term& term);
inline std::string to_smtlib(const TermPtr& term) { return to_smtlib(*term); }
std::ostream& operator<<(std::ostream& os, const Term& term);

/// Variables by name. Within one system a name has exactly one sort.
using VarSet = std::map<std::string, Sort>;
using Substitution = std::map<std::string, TermPtr>;

VarSet free_vars(const TermPtr& term);
bool has_quantifier(const TermPtr& term);
bool structurally_equal(const TermPtr& a, const TermPtr& b);

/// Capture-avoiding simultaneous substitution of free variables.
TermPtr substitute(const TermPtr& term, const Substitution& mapping);

/// Cheap rewriting: flattening and sorting of conjunctions/disjunctions,
/// constant folding, negation of comparisons. Result is equivalent.
TermPtr simplify(const TermPtr& term);

/// Top-level conjuncts (flattening nested `and`); `true` yields none.
std::vector<TermPtr> conjuncts(const TermPtr& term);

/// Applies `fn` to every sub-term, parents before children.
void visit(const TermPtr& term, const std::function<void(const TermPtr&)>& fn);

}  // namespace chcta

#endif  // CHCTA_TERM_HPP
