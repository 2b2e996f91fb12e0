#pragma once

#include <Eigen/Dense>

#include <deque>
#include <functional>

namespace spot {

struct LbfgsOptions {
  int memory = 8;
  int max_iterations = 100;
  double gradient_tolerance = 1e-6;  // on ||g|| / max(1, ||x||)
  double armijo = 1e-4;
  int max_line_search = 40;
};

struct LbfgsResult {
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Limited-memory BFGS with two-loop recursion and Armijo backtracking.
// `eval(x, grad)` returns f(x) and fills grad. Accepted steps never
// increase f.
inline LbfgsResult lbfgs_minimize(
    Eigen::VectorXd &x,
    const std::function<double(const Eigen::VectorXd &, Eigen::VectorXd &)>
        &eval,
    const LbfgsOptions &opt = {}) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd grad(n), new_grad(n), direction(n), new_x(n);
  LbfgsResult result;
  result.fx = eval(x, grad);

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)
  double gamma = 1.0;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    result.iterations = iter;
    if (grad.norm() <= opt.gradient_tolerance * std::max(1.0, x.norm())) {
      result.converged = true;
      return result;
    }

    // Two-loop recursion.
    direction = -grad;
    Eigen::VectorXd alpha(static_cast<int>(history.size()));
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      const auto &[s, y] = history[i];
      alpha[i] = s.dot(direction) / y.dot(s);
      direction -= alpha[i] * y;
    }
    direction *= gamma;
    for (std::size_t i = 0; i < history.size(); ++i) {
      const auto &[s, y] = history[i];
      const double beta = y.dot(direction) / y.dot(s);
      direction += (alpha[static_cast<int>(i)] - beta) * s;
    }
    double dg = grad.dot(direction);
    if (dg >= 0.0) {  // not a descent direction; fall back to steepest
      direction = -grad;
      dg = -grad.squaredNorm();
      history.clear();
      gamma = 1.0;
    }

    // Backtracking Armijo line search.
    double step = 1.0;
    double new_fx = result.fx;
    bool accepted = false;
    for (int ls = 0; ls < opt.max_line_search; ++ls) {
      new_x = x + step * direction;
      new_fx = eval(new_x, new_grad);
      if (new_fx <= result.fx + opt.armijo * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return result;  // stalled

    const Eigen::VectorXd s = new_x - x;
    const Eigen::VectorXd y = new_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {  // cautious update
      history.emplace_back(s, y);
      if (static_cast<int>(history.size()) > opt.memory) history.pop_front();
      gamma = sy / y.squaredNorm();
    }
    x = new_x;
    grad = new_grad;
    result.fx = new_fx;
  }
  return result;
}

}  // namespace spot
