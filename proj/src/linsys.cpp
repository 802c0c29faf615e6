#include "housealloc/linsys.hpp"

#include <algorithm>
#include <cassert>

namespace housealloc {

void LinearSystem::add_equality(std::vector<LinearTerm> terms, Rational rhs) {
    for (const auto& t : terms)
        if (t.var < 0 || t.var >= var_count_)
            throw std::invalid_argument("LinearSystem: variable out of range");
    rows_.push_back({std::move(terms), std::move(rhs)});
}

bool LinearSystem::satisfied_by(std::span<const Rational> values) const {
    if (static_cast<int>(values.size()) != var_count_) return false;
    for (const auto& row : rows_) {
        Rational lhs;
        for (const auto& t : row.terms) lhs += t.coef * values[t.var];
        if (lhs != row.rhs) return false;
    }
    return true;
}

namespace {

// Dense row over a compacted variable set.
struct DenseRow {
    std::vector<Rational> a;
    Rational rhs;
};

// Reduced row echelon form in place. Returns pivot column per row (or -1).
std::vector<int> rref(std::vector<DenseRow>& mat, int cols) {
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < cols && r < static_cast<int>(mat.size()); ++c) {
        int sel = -1;
        for (int i = r; i < static_cast<int>(mat.size()); ++i)
            if (!mat[i].a[c].is_zero()) { sel = i; break; }
        if (sel < 0) continue;
        std::swap(mat[r], mat[sel]);
        Rational pv = mat[r].a[c];
        for (auto& x : mat[r].a) x /= pv;
        mat[r].rhs /= pv;
        for (int i = 0; i < static_cast<int>(mat.size()); ++i) {
            if (i == r || mat[i].a[c].is_zero()) continue;
            Rational f = mat[i].a[c];
            for (int j = 0; j < cols; ++j) mat[i].a[j] -= f * mat[r].a[j];
            mat[i].rhs -= f * mat[r].rhs;
        }
        pivot_col.push_back(c);
        ++r;
    }
    return pivot_col;
}

// --- exact simplex (Bland's rule) -------------------------------------------
//
// Tableau over columns [structural | artificial | rhs]; basis columns are kept
// as identity by pivoting. Minimization.

struct Tableau {
    int nrows = 0, ncols = 0;  // ncols excludes rhs
    std::vector<std::vector<Rational>> t;  // nrows x (ncols + 1)
    std::vector<int> basis;
    std::vector<bool> blocked;  // columns barred from entering (artificials)

    void pivot(int r, int c) {
        Rational pv = t[r][c];
        for (auto& x : t[r]) x /= pv;
        for (int i = 0; i < nrows; ++i) {
            if (i == r || t[i][c].is_zero()) continue;
            Rational f = t[i][c];
            for (int j = 0; j <= ncols; ++j) t[i][j] -= f * t[r][j];
        }
        basis[r] = c;
    }

    // Minimizes cost.x from the current basic feasible point. Returns the
    // optimal objective value; the region is bounded here by construction.
    Rational minimize(const std::vector<Rational>& cost) {
        while (true) {
            // reduced cost d_j = cost_j - cost_B . column_j
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                if (blocked[j]) continue;
                Rational d = cost[j];
                for (int i = 0; i < nrows; ++i)
                    if (!cost[basis[i]].is_zero() && !t[i][j].is_zero())
                        d -= cost[basis[i]] * t[i][j];
                if (d.sign() < 0) { enter = j; break; }  // Bland: least index
            }
            if (enter < 0) break;
            int leave = -1;
            Rational best;
            for (int i = 0; i < nrows; ++i) {
                if (t[i][enter].sign() <= 0) continue;
                Rational ratio = t[i][ncols] / t[i][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0)
                throw std::logic_error("simplex: unbounded on a bounded polytope");
            pivot(leave, enter);
        }
        Rational val;
        for (int i = 0; i < nrows; ++i)
            if (!cost[basis[i]].is_zero()) val += cost[basis[i]] * t[i][ncols];
        return val;
    }
};

// Phase-1 setup for A x = b, x >= 0 with artificials. Returns nullopt when
// infeasible; otherwise a tableau whose artificial columns are blocked.
std::optional<Tableau> phase1(const std::vector<std::vector<Rational>>& a,
                              const std::vector<Rational>& b, int nvars) {
    int nrows = static_cast<int>(a.size());
    Tableau tb;
    tb.nrows = nrows;
    tb.ncols = nvars + nrows;
    tb.t.assign(nrows, std::vector<Rational>(tb.ncols + 1));
    tb.basis.resize(nrows);
    tb.blocked.assign(tb.ncols, false);
    for (int i = 0; i < nrows; ++i) {
        bool neg = b[i].sign() < 0;
        for (int j = 0; j < nvars; ++j) tb.t[i][j] = neg ? -a[i][j] : a[i][j];
        tb.t[i][nvars + i] = Rational(1);
        tb.t[i][tb.ncols] = neg ? -b[i] : b[i];
        tb.basis[i] = nvars + i;
    }
    std::vector<Rational> cost(tb.ncols);
    for (int i = 0; i < nrows; ++i) cost[nvars + i] = Rational(1);
    if (!tb.minimize(cost).is_zero()) return std::nullopt;
    // drive remaining artificials out of the basis where possible
    for (int i = 0; i < nrows; ++i) {
        if (tb.basis[i] < nvars) continue;
        for (int j = 0; j < nvars; ++j)
            if (!tb.t[i][j].is_zero()) { tb.pivot(i, j); break; }
    }
    for (int j = nvars; j < tb.ncols; ++j) tb.blocked[j] = true;
    return tb;
}

}  // namespace

SolveOutcome solve(const LinearSystem& sys, const SolveOptions& opts) {
    const int nv = sys.var_count();
    SolveOutcome out;
    out.pinned.assign(nv, std::nullopt);

    // affine dimension from a one-off RREF of the raw equalities
    {
        std::vector<DenseRow> mat;
        for (const auto& row : sys.rows()) {
            DenseRow d{std::vector<Rational>(nv), row.rhs};
            for (const auto& t : row.terms) d.a[t.var] += t.coef;
            mat.push_back(std::move(d));
        }
        auto pivots = rref(mat, nv);
        for (const auto& row : mat) {
            bool all_zero = std::all_of(row.a.begin(), row.a.end(),
                                        [](const Rational& x) { return x.is_zero(); });
            if (all_zero && !row.rhs.is_zero()) {
                out.kind = SolveOutcome::Kind::Infeasible;
                return out;
            }
        }
        out.affine_dim = nv - static_cast<int>(pivots.size());
    }

    // pin by elimination + sign propagation until stable
    std::vector<std::optional<Rational>>& pin = out.pinned;
    const Rational zero(0), one(1);
    auto set_pin = [&](int v, const Rational& val) -> bool {
        if (val < zero || val > one) return false;
        if (pin[v]) return val == *pin[v];
        pin[v] = val;
        return true;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<DenseRow> mat;
        for (const auto& row : sys.rows()) {
            DenseRow d{std::vector<Rational>(nv), row.rhs};
            for (const auto& t : row.terms) {
                if (pin[t.var])
                    d.rhs -= t.coef * *pin[t.var];
                else
                    d.a[t.var] += t.coef;
            }
            mat.push_back(std::move(d));
        }
        rref(mat, nv);
        for (const auto& row : mat) {
            std::vector<int> live;
            for (int v = 0; v < nv; ++v)
                if (!row.a[v].is_zero()) live.push_back(v);
            if (live.empty()) {
                if (!row.rhs.is_zero()) {
                    out.kind = SolveOutcome::Kind::Infeasible;
                    return out;
                }
                continue;
            }
            if (live.size() == 1) {
                if (!set_pin(live[0], row.rhs / row.a[live[0]])) {
                    out.kind = SolveOutcome::Kind::Infeasible;
                    return out;
                }
                changed = true;
                continue;
            }
            // uniform-sign rows pin whole groups to a bound
            bool all_pos = std::all_of(live.begin(), live.end(),
                                       [&](int v) { return row.a[v].sign() > 0; });
            bool all_neg = std::all_of(live.begin(), live.end(),
                                       [&](int v) { return row.a[v].sign() < 0; });
            if (!all_pos && !all_neg) continue;
            Rational coef_sum;
            for (int v : live) coef_sum += row.a[v];
            if (row.rhs.is_zero()) {
                for (int v : live)
                    if (!set_pin(v, zero)) { out.kind = SolveOutcome::Kind::Infeasible; return out; }
                changed = true;
            } else if (row.rhs == coef_sum) {
                for (int v : live)
                    if (!set_pin(v, one)) { out.kind = SolveOutcome::Kind::Infeasible; return out; }
                changed = true;
            }
        }
    }

    auto finish_if_complete = [&]() -> bool {
        for (int v = 0; v < nv; ++v)
            if (!pin[v]) return false;
        out.solution.resize(nv);
        for (int v = 0; v < nv; ++v) out.solution[v] = *pin[v];
        if (!sys.satisfied_by(out.solution)) {
            out.kind = SolveOutcome::Kind::Infeasible;
            return true;
        }
        out.kind = SolveOutcome::Kind::Unique;
        return true;
    };
    if (finish_if_complete()) return out;

    if (!opts.box_probe) {
        out.kind = SolveOutcome::Kind::Underdetermined;
        return out;
    }

    // exact box probe over the unknowns: u in [0,1]^k, residual equalities.
    std::vector<int> unknown;
    for (int v = 0; v < nv; ++v)
        if (!pin[v]) unknown.push_back(v);
    const int k = static_cast<int>(unknown.size());
    std::vector<int> uix(nv, -1);
    for (int j = 0; j < k; ++j) uix[unknown[j]] = j;

    // columns: u_0..u_{k-1}, slack s_0..s_{k-1} with u_j + s_j = 1
    const int nvar_lp = 2 * k;
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (const auto& row : sys.rows()) {
        std::vector<Rational> r(nvar_lp);
        Rational rhs = row.rhs;
        bool nontrivial = false;
        for (const auto& t : row.terms) {
            if (pin[t.var])
                rhs -= t.coef * *pin[t.var];
            else {
                r[uix[t.var]] += t.coef;
                nontrivial = true;
            }
        }
        if (nontrivial) {
            a.push_back(std::move(r));
            b.push_back(std::move(rhs));
        }
    }
    for (int j = 0; j < k; ++j) {
        std::vector<Rational> r(nvar_lp);
        r[j] = Rational(1);
        r[k + j] = Rational(1);
        a.push_back(std::move(r));
        b.push_back(Rational(1));
    }
    auto tb = phase1(a, b, nvar_lp);
    if (!tb) {
        out.kind = SolveOutcome::Kind::Infeasible;
        return out;
    }
    bool all_pinned = true;
    for (int j = 0; j < k; ++j) {
        std::vector<Rational> cost(tb->ncols);
        cost[j] = Rational(1);
        Rational lo = tb->minimize(cost);
        cost[j] = Rational(-1);
        Rational hi = -tb->minimize(cost);
        if (lo == hi)
            pin[unknown[j]] = lo;
        else
            all_pinned = false;
    }
    if (all_pinned && finish_if_complete()) return out;
    out.kind = SolveOutcome::Kind::Underdetermined;
    return out;
}

std::optional<std::vector<Rational>> feasible_combination(
    const AssignmentMatrix& target, const std::vector<AssignmentMatrix>& vertices) {
    if (vertices.empty()) throw std::invalid_argument("feasible_combination: no vertices");
    const int n = target.agents(), m = target.houses();
    for (const auto& v : vertices)
        if (v.agents() != n || v.houses() != m)
            throw std::invalid_argument("feasible_combination: dimension mismatch");
    const int nw = static_cast<int>(vertices.size());
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (int i = 0; i < n; ++i) {
        for (House h = 0; h < m; ++h) {
            std::vector<Rational> row(nw);
            for (int kk = 0; kk < nw; ++kk) row[kk] = vertices[kk].at(i, h);
            a.push_back(std::move(row));
            b.push_back(target.at(i, h));
        }
    }
    a.emplace_back(nw, Rational(1));
    b.push_back(Rational(1));

    auto tb = phase1(a, b, nw);
    if (!tb) return std::nullopt;
    std::vector<Rational> w(nw);
    for (int i = 0; i < tb->nrows; ++i)
        if (tb->basis[i] < nw) w[tb->basis[i]] = tb->t[i][tb->ncols];
    return w;
}

}  // namespace housealloc
