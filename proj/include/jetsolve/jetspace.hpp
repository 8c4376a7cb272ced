#pragma once

#include "jetsolve/expr.hpp"
#include "jetsolve/rnf.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace jetsolve {

/// Raised whenever a computation would need a jet coordinate above the truncation K.
class TruncationOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// u^i_t = f^i(x, t, u^j_r) in the chart (x, t, u^i_r) with r <= K.
class EvolutionSystem {
public:
    /// `truncation` < 0 selects order_bound + 4.
    EvolutionSystem(SymbolTable table, std::vector<Expr> rhs, int truncation = -1);

    [[nodiscard]] int m() const { return static_cast<int>(f_.size()); }
    [[nodiscard]] const std::vector<Expr>& f() const { return f_; }
    [[nodiscard]] const Expr& f(int dependent) const { return f_.at(dependent - 1); }
    [[nodiscard]] int order_bound() const { return order_bound_; }
    [[nodiscard]] int truncation() const { return truncation_; }
    [[nodiscard]] const SymbolTable& table() const { return table_; }
    [[nodiscard]] Symbol x() const { return table_.x(); }
    [[nodiscard]] Symbol t() const { return table_.t(); }
    [[nodiscard]] Symbol jet(int dependent, int order) const { return table_.jet(dependent, order); }

    /// D̄_x^r(f^i), computed lazily and cached under (i, r).
    [[nodiscard]] Expr prolongation(int dependent, int r) const;

    /// Throws TruncationOverflow if e contains a jet of order > limit.
    void require_order(const Expr& e, int limit, const char* what) const;

private:
    SymbolTable table_;
    std::vector<Expr> f_;
    int order_bound_ = 0;
    int truncation_ = 0;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<int, int>, Expr> cache_;
};

/// Highest x-order of any jet symbol in e, or -1.
int max_jet_order(const Expr& e);

Expr bar_Dx(const Expr& e, const EvolutionSystem& sys);
Expr bar_Dt(const Expr& e, const EvolutionSystem& sys);

/// Zero test of D̄_x D̄_t e - D̄_t D̄_x e.
ZeroTestResult commutator_check(const EvolutionSystem& sys, const Expr& e);

}  // namespace jetsolve
