#pragma once

#include <Eigen/Core>
#include <vector>

namespace coagself {

// Gauss-Legendre nodes/weights on [-1,1]. Computed once per order via
// Newton iteration on the Legendre recurrence; results are cached and
// deterministic.
struct GaussRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

const GaussRule& gauss_legendre(int order);

// Nodes/weights mapped to [a,b].
void gauss_on(const GaussRule& rule, double a, double b, Eigen::ArrayXd& x,
              Eigen::ArrayXd& w);

// Value at x of the degree-(m-1) polynomial through (nodes[i], values[i]).
double lagrange_value(const double* nodes, const double* values, int m, double x);

}  // namespace coagself
