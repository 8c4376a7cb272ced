#include "jetsolve/jetspace.hpp"

#include <algorithm>
#include <string>

namespace jetsolve {

int max_jet_order(const Expr& e) {
    int best = -1;
    for (const auto& s : free_symbols(e))
        if (s.is_jet()) best = std::max(best, s.order());
    return best;
}

EvolutionSystem::EvolutionSystem(SymbolTable table, std::vector<Expr> rhs, int truncation)
    : table_(std::move(table)), f_(std::move(rhs)) {
    if (static_cast<int>(f_.size()) != table_.dependent_count())
        throw std::invalid_argument("evolution system needs one right-hand side per dependent variable");
    for (const auto& fi : f_)
        for (const auto& s : free_symbols(fi))
            if (s.role() == SymbolRole::LevelConstant)
                throw std::invalid_argument("level constant " + s.name() + " in an evolution equation");
    for (const auto& fi : f_) order_bound_ = std::max(order_bound_, max_jet_order(fi));
    truncation_ = truncation < 0 ? order_bound_ + 4 : truncation;
    if (truncation_ < order_bound_)
        throw TruncationOverflow("truncation K=" + std::to_string(truncation_) + " below the order bound " +
                                 std::to_string(order_bound_));
}

void EvolutionSystem::require_order(const Expr& e, int limit, const char* what) const {
    for (const auto& s : free_symbols(e))
        if (s.is_jet() && s.order() > limit)
            throw TruncationOverflow(std::string(what) + ": " + s.display() + " exceeds the usable order " +
                                     std::to_string(limit) + " (K=" + std::to_string(truncation_) + ")");
}

Expr EvolutionSystem::prolongation(int dependent, int r) const {
    if (dependent < 1 || dependent > m()) throw std::out_of_range("dependent index out of range");
    if (order_bound_ + r > truncation_)
        throw TruncationOverflow("prolongation D_x^" + std::to_string(r) + " f^" + std::to_string(dependent) +
                                 " needs order " + std::to_string(order_bound_ + r) + " > K=" +
                                 std::to_string(truncation_));
    {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find({dependent, r});
        if (it != cache_.end()) return it->second;
    }
    Expr value = r == 0 ? f_[dependent - 1] : bar_Dx(prolongation(dependent, r - 1), *this);
    std::lock_guard lock(cache_mutex_);
    return cache_.emplace(std::make_pair(dependent, r), value).first->second;
}

Expr bar_Dx(const Expr& e, const EvolutionSystem& sys) {
    sys.require_order(e, sys.truncation() - 1, "D_x");
    std::vector<Expr> terms{diff(e, sys.x())};
    for (const auto& s : free_symbols(e))
        if (s.is_jet()) terms.push_back(Expr(s.shifted(1)) * diff(e, s));
    return make_add(std::move(terms));
}

Expr bar_Dt(const Expr& e, const EvolutionSystem& sys) {
    sys.require_order(e, sys.truncation() - sys.order_bound(), "D_t");
    std::vector<Expr> terms{diff(e, sys.t())};
    for (const auto& s : free_symbols(e))
        if (s.is_jet()) terms.push_back(sys.prolongation(s.dependent(), s.order()) * diff(e, s));
    return make_add(std::move(terms));
}

ZeroTestResult commutator_check(const EvolutionSystem& sys, const Expr& e) {
    return zero_test(bar_Dx(bar_Dt(e, sys), sys) - bar_Dt(bar_Dx(e, sys), sys));
}

}  // namespace jetsolve
