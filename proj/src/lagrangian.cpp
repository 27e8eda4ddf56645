#include "monge/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "monge/error.hpp"

namespace monge {

namespace {

// Objective of the tilde Hamiltonian along the direction e(θ).
double tilde_direction_value(const FinslerMetric& metric, NodeId x, const Vec2& p, double theta) {
  const Vec2 e(std::cos(theta), std::sin(theta));
  const double pe = std::max(0.0, p.dot(e));
  const double n = metric.eval_unchecked(x, e);
  return pe * pe / (2.0 * n * n);
}

}  // namespace

Lagrangian Lagrangian::tilde(FinslerMetric metric, double shift) {
  Lagrangian l;
  l.kind_ = LagrangianKind::kTildeFinsler;
  l.shift_ = shift;
  l.metric_ = std::make_shared<const FinslerMetric>(std::move(metric));
  return l;
}

Lagrangian Lagrangian::quadratic(std::vector<Mat2> g, std::vector<double> potential, double shift) {
  if (g.size() != potential.size()) {
    throw Error(ErrorKind::kInvalidConfig, "quadratic Lagrangian fields have mismatched sizes");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (Eigen::LLT<Mat2>(g[i]).info() != Eigen::Success ||
        std::abs(g[i](0, 1) - g[i](1, 0)) > 1e-12 * (1.0 + g[i].norm())) {
      throw Error(ErrorKind::kInvalidConfig,
                  "quadratic Lagrangian needs a symmetric positive definite G at node " +
                      std::to_string(i));
    }
  }
  Lagrangian l;
  l.kind_ = LagrangianKind::kQuadratic;
  l.shift_ = shift;
  l.g_ = std::make_shared<const std::vector<Mat2>>(std::move(g));
  l.potential_ = std::make_shared<const std::vector<double>>(std::move(potential));
  return l;
}

Lagrangian Lagrangian::with_shift(double shift) const {
  Lagrangian l = *this;
  l.shift_ = shift;
  return l;
}

std::size_t Lagrangian::node_count() const {
  return kind_ == LagrangianKind::kTildeFinsler ? metric_->node_count() : g_->size();
}

double Lagrangian::value(NodeId x, const Vec2& v) const {
  if (kind_ == LagrangianKind::kTildeFinsler) {
    const double n = metric_->eval(x, v);
    return 0.5 * (1.0 + n * n);
  }
  const auto i = static_cast<std::size_t>(x);
  return 0.5 * v.dot((*g_)[i] * v) + (*potential_)[i];
}

Vec2 Lagrangian::velocity_gradient(NodeId x, const Vec2& v) const {
  if (kind_ == LagrangianKind::kTildeFinsler) {
    if (v.norm() == 0.0) return Vec2::Zero();
    return metric_->eval(x, v) * metric_->gradient(x, v);
  }
  return (*g_)[static_cast<std::size_t>(x)] * v;
}

double Lagrangian::hessian_form(NodeId x, const Vec2& v, const Vec2& w) const {
  if (kind_ == LagrangianKind::kTildeFinsler) {
    if (v.norm() == 0.0) return w.dot(metric_->g(x) * w);
    const double dn = metric_->gradient(x, v).dot(w);
    return dn * dn + metric_->eval(x, v) * w.dot(metric_->hessian(x, v) * w);
  }
  return w.dot((*g_)[static_cast<std::size_t>(x)] * w);
}

double Lagrangian::energy(NodeId x, const Vec2& v) const {
  return velocity_gradient(x, v).dot(v) - value(x, v);
}

double Lagrangian::hamiltonian(NodeId x, const Vec2& p) const {
  if (kind_ == LagrangianKind::kQuadratic) {
    const auto i = static_cast<std::size_t>(x);
    return 0.5 * p.dot((*g_)[i].ldlt().solve(p)) - (*potential_)[i];
  }
  if (p.norm() == 0.0) return -0.5;
  // Coarse scan for the best direction, then golden-section refinement.
  constexpr int kScan = 720;
  const double step = 2.0 * std::numbers::pi / kScan;
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < kScan; ++k) {
    const double f = tilde_direction_value(*metric_, x, p, k * step);
    if (f > best_value) {
      best_value = f;
      best = k;
    }
  }
  double a = (best - 1) * step;
  double b = (best + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = tilde_direction_value(*metric_, x, p, c);
  double fd = tilde_direction_value(*metric_, x, p, d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = tilde_direction_value(*metric_, x, p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = tilde_direction_value(*metric_, x, p, d);
    }
  }
  return std::max({best_value, fc, fd}) - 0.5;
}

double Lagrangian::positivity_floor() const {
  if (kind_ == LagrangianKind::kTildeFinsler) return 0.5 + shift_;
  return *std::min_element(potential_->begin(), potential_->end()) + shift_;
}

std::string Lagrangian::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (kind_ == LagrangianKind::kTildeFinsler) {
    out << "tilde{" << metric_->describe() << "}";
  } else {
    out << "quadratic[" << g_->size() << "]";
    for (std::size_t i = 0; i < g_->size(); ++i) {
      const Mat2& g = (*g_)[i];
      out << ";" << g(0, 0) << "," << g(0, 1) << "," << g(1, 1) << "," << (*potential_)[i];
    }
  }
  out << ";k=" << shift_;
  return out.str();
}

LagrangianAudit lagrangian_audit(const Lagrangian& lagrangian, const DiscreteManifold& manifold,
                                 std::size_t sample_count, std::uint64_t seed) {
  LagrangianAudit audit;
  audit.min_second_difference = std::numeric_limits<double>::infinity();
  audit.min_superlinear_growth = std::numeric_limits<double>::infinity();
  audit.sampled_floor = std::numeric_limits<double>::infinity();
  const std::size_t n = manifold.node_count();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> radius(0.0, 2.0);
  const double k = lagrangian.shift();
  for (std::size_t s = 0; s < sample_count; ++s) {
    const auto x = static_cast<NodeId>(pick(rng));
    const double a = angle(rng);
    const Vec2 e(std::cos(a), std::sin(a));
    const Vec2 v = e * radius(rng);
    const double b = angle(rng);
    const Vec2 w = 1e-2 * Vec2(std::cos(b), std::sin(b));

    const double second =
        lagrangian.value(x, v + w) + lagrangian.value(x, v - w) - 2.0 * lagrangian.value(x, v);
    audit.min_second_difference = std::min(audit.min_second_difference, second / w.squaredNorm());

    const double base = lagrangian.value(x, e) + k;
    const double far = (lagrangian.value(x, 1000.0 * e) + k) / 1000.0;
    if (base > 0.0) audit.min_superlinear_growth = std::min(audit.min_superlinear_growth, far / base);

    audit.sampled_floor = std::min({audit.sampled_floor, lagrangian.value(x, v) + k,
                                    lagrangian.value(x, Vec2::Zero()) + k});
    ++audit.samples;
  }
  return audit;
}

}  // namespace monge
