#include "feaskit/problem.hpp"

#include <stdexcept>

namespace feaskit {

ConstraintClass classify_constraint(double y, double q, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("classify: eps must be positive");
    if (y <= q - eps) return ConstraintClass::desirable;
    if (y >= q + eps) return ConstraintClass::unacceptable;
    return ConstraintClass::acceptable;
}

SystemClass classify_system(std::span<const double> y, std::span<const double> q,
                            std::span<const double> eps) {
    if (y.size() != q.size() || y.size() != eps.size())
        throw std::invalid_argument("classify: dimension mismatch");
    bool all_desirable = true;
    for (std::size_t l = 0; l < y.size(); ++l) {
        switch (classify_constraint(y[l], q[l], eps[l])) {
            case ConstraintClass::unacceptable:
                return SystemClass::unacceptable;
            case ConstraintClass::acceptable:
                all_desirable = false;
                break;
            case ConstraintClass::desirable:
                break;
        }
    }
    return all_desirable ? SystemClass::desirable : SystemClass::acceptable;
}

void ProblemSpec::validate() const {
    if (k < 1) throw std::invalid_argument("problem: k must be >= 1");
    if (s < 1) throw std::invalid_argument("problem: s must be >= 1");
    if (static_cast<long>(q.size()) != s || static_cast<long>(eps.size()) != s)
        throw std::invalid_argument("problem: q and eps must have one entry per constraint");
    for (double e : eps)
        if (!(e > 0.0)) throw std::invalid_argument("problem: tolerances must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("problem: alpha must lie in (0, 1)");
    if (c < 1) throw std::invalid_argument("problem: c must be >= 1");
}

std::vector<long> ProcedureResult::declared_feasible() const {
    std::vector<long> feasible;
    for (std::size_t i = 0; i < verdicts.size(); ++i)
        if (verdicts[i] == Verdict::feasible) feasible.push_back(static_cast<long>(i));
    return feasible;
}

bool is_correct_decision(std::span<const SystemClass> truth, const ProcedureResult& result) {
    if (truth.size() != result.verdicts.size())
        throw std::invalid_argument("is_correct_decision: system count mismatch");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == SystemClass::desirable && result.verdicts[i] != Verdict::feasible)
            return false;
        if (truth[i] == SystemClass::unacceptable && result.verdicts[i] == Verdict::feasible)
            return false;
    }
    return true;
}

}  // namespace feaskit
