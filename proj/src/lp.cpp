#include "oran/lp.hpp"

#include <cmath>
#include <limits>

namespace oran::lp {

namespace {

constexpr double kEps = 1e-9;

// Dense tableau: rows 0..m-1 constraints, row m objective (reduced costs).
struct Tableau {
    int m = 0;
    int n = 0;  // columns excluding rhs
    std::vector<double> a;
    std::vector<int> basis;
    long pivots = 0;

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * (n + 1) + c]; }
    double& rhs(int r) { return at(r, n); }

    void pivot(int pr, int pc) {
        ++pivots;
        const double inv = 1.0 / at(pr, pc);
        for (int c = 0; c <= n; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (int r = 0; r <= m; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c <= n; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis[pr] = pc;
    }

    // Minimizes the objective row; `allowed` masks columns that may enter.
    Status run(const std::vector<char>& allowed, long max_pivots) {
        for (;;) {
            if (pivots >= max_pivots) return Status::iteration_limit;
            int pc = -1;
            for (int c = 0; c < n; ++c) {
                if (allowed[c] && at(m, c) < -kEps) {
                    pc = c;
                    break;
                }
            }
            if (pc < 0) return Status::optimal;
            int pr = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                const double v = at(r, pc);
                if (v > kEps) {
                    const double ratio = rhs(r) / v;
                    if (ratio < best - 1e-12 ||
                        (std::abs(ratio - best) <= 1e-12 && pr >= 0 && basis[r] < basis[pr])) {
                        best = ratio;
                        pr = r;
                    }
                }
            }
            if (pr < 0) return Status::unbounded;
            pivot(pr, pc);
        }
    }
};

}  // namespace

Solution solve(const Problem& p, long max_pivots) {
    const int m = static_cast<int>(p.rows.size());
    const int nv = p.num_vars;
    // Column layout: [structural | slack/surplus | artificial].
    int n_slack = 0;
    int n_art = 0;
    for (const auto& r : p.rows) {
        const bool flip = r.rhs < 0;
        Sense s = r.sense;
        if (flip && s != Sense::eq) s = (s == Sense::le) ? Sense::ge : Sense::le;
        if (s != Sense::eq) ++n_slack;
        if (s != Sense::le) ++n_art;
    }
    Tableau t;
    t.m = m;
    t.n = nv + n_slack + n_art;
    t.a.assign(static_cast<std::size_t>(m + 1) * (t.n + 1), 0.0);
    t.basis.assign(m, -1);

    int slack_col = nv;
    int art_col = nv + n_slack;
    std::vector<char> is_art(t.n, 0);
    for (int i = 0; i < m; ++i) {
        const auto& r = p.rows[i];
        const double sign = r.rhs < 0 ? -1.0 : 1.0;
        Sense s = r.sense;
        if (sign < 0 && s != Sense::eq) s = (s == Sense::le) ? Sense::ge : Sense::le;
        for (const auto& [j, v] : r.coef) t.at(i, j) += sign * v;
        t.rhs(i) = sign * r.rhs;
        if (s == Sense::le) {
            t.at(i, slack_col) = 1.0;
            t.basis[i] = slack_col++;
        } else if (s == Sense::ge) {
            t.at(i, slack_col++) = -1.0;
            t.at(i, art_col) = 1.0;
            is_art[art_col] = 1;
            t.basis[i] = art_col++;
        } else {
            t.at(i, art_col) = 1.0;
            is_art[art_col] = 1;
            t.basis[i] = art_col++;
        }
    }

    Solution sol;
    std::vector<char> allowed(t.n, 1);
    if (n_art > 0) {
        // Phase 1: minimize the sum of artificials.
        for (int c = 0; c <= t.n; ++c) t.at(m, c) = 0.0;
        for (int i = 0; i < m; ++i) {
            if (!is_art[t.basis[i]]) continue;
            for (int c = 0; c <= t.n; ++c)
                if (!is_art[c] || c == t.n) t.at(m, c) -= t.at(i, c);
        }
        const Status st = t.run(allowed, max_pivots);
        if (st == Status::iteration_limit) {
            sol.status = st;
            return sol;
        }
        if (-t.rhs(m) > 1e-7) {
            sol.status = Status::infeasible;
            sol.pivots = t.pivots;
            return sol;
        }
        // Drive remaining artificials out of the basis where possible.
        for (int i = 0; i < m; ++i) {
            if (!is_art[t.basis[i]]) continue;
            for (int c = 0; c < nv + n_slack; ++c) {
                if (std::abs(t.at(i, c)) > kEps) {
                    t.pivot(i, c);
                    break;
                }
            }
        }
        for (int c = 0; c < t.n; ++c)
            if (is_art[c]) allowed[c] = 0;
    }

    // Phase 2 objective row: reduced costs c_j - c_B B^-1 A_j.
    for (int c = 0; c <= t.n; ++c) t.at(m, c) = (c < nv) ? p.cost[c] : 0.0;
    for (int i = 0; i < m; ++i) {
        const int b = t.basis[i];
        const double cb = b < nv ? p.cost[b] : 0.0;
        if (cb == 0.0) continue;
        for (int c = 0; c <= t.n; ++c) t.at(m, c) -= cb * t.at(i, c);
    }
    const Status st = t.run(allowed, max_pivots);
    sol.status = st;
    sol.pivots = t.pivots;
    if (st != Status::optimal) return sol;
    sol.x.assign(nv, 0.0);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < nv) sol.x[t.basis[i]] = t.rhs(i);
    sol.objective = 0.0;
    for (int j = 0; j < nv; ++j) sol.objective += p.cost[j] * sol.x[j];
    return sol;
}

}  // namespace oran::lp
