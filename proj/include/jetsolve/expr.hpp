#pragma once

#include "jetsolve/rational.hpp"
#include "jetsolve/symbol.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetsolve {

/// Node kinds; the enumerator order is the first key of the canonical subtree order.
enum class ExprKind : unsigned char { Number, Symbol, Pow, Mul, Add, Func };

enum class FuncKind : unsigned char { Exp, Log, Sin, Cos };

const char* func_name(FuncKind f);

/// Immutable, shared expression tree. Every value is produced by the smart
/// constructors below and is therefore normalized: sums and products are flattened,
/// constant-folded, like terms / equal bases are collected, and operands are sorted.
class Expr {
public:
    Expr();  // the number 0
    Expr(int value);                // NOLINT(google-explicit-constructor)
    Expr(long value);               // NOLINT(google-explicit-constructor)
    Expr(const Rational& value);    // NOLINT(google-explicit-constructor)
    Expr(const Symbol& symbol);     // NOLINT(google-explicit-constructor)

    [[nodiscard]] ExprKind kind() const;
    [[nodiscard]] bool is_number() const { return kind() == ExprKind::Number; }
    [[nodiscard]] bool is_symbol() const { return kind() == ExprKind::Symbol; }
    [[nodiscard]] bool is_pow() const { return kind() == ExprKind::Pow; }
    [[nodiscard]] bool is_mul() const { return kind() == ExprKind::Mul; }
    [[nodiscard]] bool is_add() const { return kind() == ExprKind::Add; }
    [[nodiscard]] bool is_func() const { return kind() == ExprKind::Func; }
    [[nodiscard]] bool is_func(FuncKind f) const;
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool is_one() const;

    [[nodiscard]] const Rational& number() const;
    [[nodiscard]] const Symbol& symbol() const;
    [[nodiscard]] const Expr& base() const;
    [[nodiscard]] const Rational& exponent() const;
    [[nodiscard]] const std::vector<Expr>& operands() const;
    [[nodiscard]] FuncKind func() const;
    [[nodiscard]] const Expr& arg() const;

    [[nodiscard]] std::size_t hash() const;
    [[nodiscard]] const void* identity() const { return node_.get(); }

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;

    friend struct ExprFactory;
};

int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
struct ExprHash {
    std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Smart constructors.
Expr make_add(std::vector<Expr> terms);
Expr make_mul(std::vector<Expr> factors);
Expr make_pow(const Expr& base, const Rational& exponent);
Expr make_func(FuncKind f, const Expr& arg);

Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sqrt(const Expr& a);
/// a^b for symbolic b is rewritten as exp(b*log(a)).
Expr pow(const Expr& a, const Expr& b);
Expr pow(const Expr& a, const Rational& q);
Expr pow(const Expr& a, long q);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

/// Splits `c * rest` with c rational; rest is 1 for pure numbers.
std::pair<Rational, Expr> split_coefficient(const Expr& e);

/// Rebuilds the tree bottom-up through the smart constructors.
Expr normalize(const Expr& e);

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

struct SymbolLess {
    bool operator()(const Symbol& a, const Symbol& b) const { return compare(a, b) < 0; }
};
using SymbolSet = std::set<Symbol, SymbolLess>;
using Substitution = std::map<Symbol, Expr, SymbolLess>;
using Point = std::map<Symbol, double, SymbolLess>;

SymbolSet free_symbols(const Expr& e);
bool depends_on(const Expr& e, const Symbol& s);

/// Exact partial derivative, all other symbols held constant.
Expr diff(const Expr& e, const Symbol& s);

class SubstitutionCycle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simultaneous substitution iterated to a fixpoint. Throws SubstitutionCycle
/// (naming the chain) when the rule set is cyclic.
Expr substitute(const Expr& e, const Substitution& rules);
/// Single simultaneous pass, no iteration.
Expr substitute_once(const Expr& e, const Substitution& rules);

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Floating evaluation; throws EvalError for unbound symbols or domain errors.
double eval(const Expr& e, const Point& point);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    [[nodiscard]] std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parses the infix grammar; identifiers are resolved through `table`.
Expr parse(const std::string& text, const SymbolTable& table);

/// Visits every subtree (pre-order).
void visit(const Expr& e, const std::function<void(const Expr&)>& fn);

/// Number of nodes in the tree.
std::size_t tree_size(const Expr& e);

}  // namespace jetsolve
