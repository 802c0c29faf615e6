#pragma once

#include <optional>
#include <span>
#include <vector>

#include "housealloc/matrix.hpp"
#include "housealloc/rational.hpp"

namespace housealloc {

struct LinearTerm {
    int var;
    Rational coef;
};

struct LinearRow {
    std::vector<LinearTerm> terms;
    Rational rhs;
};

// Equalities over variables implicitly bounded to [0, 1].
class LinearSystem {
public:
    explicit LinearSystem(int var_count) : var_count_(var_count) {}

    int var_count() const { return var_count_; }
    void add_equality(std::vector<LinearTerm> terms, Rational rhs);
    const std::vector<LinearRow>& rows() const { return rows_; }

    bool satisfied_by(std::span<const Rational> values) const;

private:
    int var_count_;
    std::vector<LinearRow> rows_;
};

struct SolveOutcome {
    enum class Kind { Unique, Underdetermined, Infeasible };
    Kind kind = Kind::Infeasible;

    // Unique: the full solution. Underdetermined: values forced on every
    // feasible point (box-pinned), nullopt where genuinely free.
    std::vector<Rational> solution;
    std::vector<std::optional<Rational>> pinned;

    // Dimension of the affine solution space of the equalities.
    int affine_dim = 0;
};

struct SolveOptions {
    // When the affine space has dimension >= 1, probe each non-constant
    // variable's min/max over the box-restricted polytope with an exact
    // simplex; variables with min == max are pinned, and the outcome is
    // reclassified Unique when all are. Without the probe, pinning uses
    // elimination plus sign propagation only, and Underdetermined verdicts
    // are conservative.
    bool box_probe = true;
};

SolveOutcome solve(const LinearSystem& sys, const SolveOptions& opts = {});

// Nonnegative weights summing to 1 with sum_k w_k * vertex_k == target,
// or nullopt when no such weights exist. Decided exactly.
std::optional<std::vector<Rational>> feasible_combination(
    const AssignmentMatrix& target, const std::vector<AssignmentMatrix>& vertices);

}  // namespace housealloc
