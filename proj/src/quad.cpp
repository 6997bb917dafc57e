#include "coagself/quad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace coagself {

namespace {

GaussRule compute_rule(int order) {
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) r.nodes[order / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 128) throw std::invalid_argument("gauss_legendre: bad order");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

void gauss_on(const GaussRule& rule, double a, double b, Eigen::ArrayXd& x,
              Eigen::ArrayXd& w) {
  const double c = 0.5 * (a + b), s = 0.5 * (b - a);
  x = c + s * rule.nodes;
  w = s * rule.weights;
}

double lagrange_value(const double* nodes, const double* values, int m, double x) {
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    double lj = 1.0;
    for (int k = 0; k < m; ++k) {
      if (k == j) continue;
      lj *= (x - nodes[k]) / (nodes[j] - nodes[k]);
    }
    acc += lj * values[j];
  }
  return acc;
}

}  // namespace coagself
