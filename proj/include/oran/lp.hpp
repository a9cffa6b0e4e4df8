#pragma once

// Small dense two-phase simplex (Bland's rule) for the relaxation bounds.

#include <utility>
#include <vector>

namespace oran::lp {

enum class Sense { le, ge, eq };

struct Row {
    std::vector<std::pair<int, double>> coef;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/// minimize c.x subject to rows, x >= 0.
struct Problem {
    int num_vars = 0;
    std::vector<double> cost;
    std::vector<Row> rows;

    int add_var(double c) {
        cost.push_back(c);
        return num_vars++;
    }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    long pivots = 0;
};

Solution solve(const Problem& p, long max_pivots = 5'000'000);

}  // namespace oran::lp
