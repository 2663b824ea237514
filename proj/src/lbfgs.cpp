#include "pacmoo/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <vector>

namespace pacmoo {

namespace {

Vector project(const Vector& x, const Vector& lower, const Vector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// Gradient components that could still move the point inside the box.
Vector projected_gradient(const Vector& x, const Vector& g, const Vector& lower,
                          const Vector& upper) {
  Vector pg = g;
  for (Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)) pg[i] = 0.0;
  }
  return pg;
}

}  // namespace

LbfgsResult minimize_lbfgs_box(const GradientObjective& objective, Vector x0, const Vector& lower,
                               const Vector& upper, int max_iterations, int memory,
                               double gradient_tolerance) {
  Vector x = project(x0, lower, upper);
  Vector g(x.size());
  double f = objective(x, g);
  if (!std::isfinite(f)) return {x, f, 0, false};

  std::deque<std::pair<Vector, Vector>> history;  // (s, y) pairs
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Vector pg = projected_gradient(x, g, lower, upper);
    if (pg.lpNorm<Eigen::Infinity>() < gradient_tolerance) return {x, f, it, true};

    // Two-loop recursion on the free variables.
    Vector q = pg;
    std::vector<double> alphas(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      const auto& [s, y] = history[i];
      alphas[i] = s.dot(q) / y.dot(s);
      q -= alphas[i] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const auto& [s, y] = history[i];
      const double beta = y.dot(q) / y.dot(s);
      q += (alphas[i] - beta) * s;
    }
    Vector direction = -q;
    for (Index i = 0; i < x.size(); ++i) {
      if (pg[i] == 0.0) direction[i] = 0.0;
    }
    if (direction.dot(pg) >= 0.0) {
      direction = -pg;
      history.clear();
    }

    double step = history.empty() ? std::min(1.0, 1.0 / pg.norm()) : 1.0;
    Vector x_new, g_new(x.size());
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = project(x + step * direction, lower, upper);
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {x, f, it, false};

    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const bool active_changed =
        ((x_new.array() <= lower.array()) != (x.array() <= lower.array())).any() ||
        ((x_new.array() >= upper.array()) != (x.array() >= upper.array())).any();
    if (active_changed) history.clear();
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      history.emplace_back(s, y);
      if (static_cast<int>(history.size()) > memory) history.pop_front();
    }
    const double previous = f;
    x = x_new;
    g = g_new;
    f = f_new;
    if (std::abs(previous - f) <= 1e-12 * (1.0 + std::abs(f))) return {x, f, it + 1, true};
  }
  return {x, f, it, false};
}

}  // namespace pacmoo
