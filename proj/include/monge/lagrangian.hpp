#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "monge/geometry.hpp"

namespace monge {

enum class LagrangianKind { kTildeFinsler, kQuadratic };

// Tonelli Lagrangian sampled at nodes, together with an energy shift k.
//
//   tilde:     L(x,v) = (1 + ‖v‖ₓ²) / 2   over a Finsler metric
//   quadratic: L(x,v) = ½ vᵀG(x)v + V(x)
//
// value/gradient/energy/hamiltonian refer to the unshifted L; the shift only
// enters the action t·(L + k) and the positivity floor.
class Lagrangian {
 public:
  static Lagrangian tilde(FinslerMetric metric, double shift = 0.0);
  static Lagrangian quadratic(std::vector<Mat2> g, std::vector<double> potential,
                              double shift = 0.0);

  Lagrangian with_shift(double shift) const;

  LagrangianKind kind() const { return kind_; }
  double shift() const { return shift_; }
  std::size_t node_count() const;
  // Only for the tilde variant.
  const FinslerMetric& metric() const { return *metric_; }

  double value(NodeId x, const Vec2& v) const;
  Vec2 velocity_gradient(NodeId x, const Vec2& v) const;
  // wᵀ ∂²ᵥL(x,v) w.
  double hessian_form(NodeId x, const Vec2& v, const Vec2& w) const;

  // E = ∂ᵥL·v − L.
  double energy(NodeId x, const Vec2& v) const;
  // H(x,p) = max_v p·v − L(x,v). Closed form for quadratic; for tilde a
  // maximisation over directions of (p·e)₊² / (2‖e‖²) − ½.
  double hamiltonian(NodeId x, const Vec2& p) const;

  // inf over (x,v) of L + k. Both variants attain the infimum at v = 0, so
  // this is min over nodes of L(x,0) + k.
  double positivity_floor() const;

  std::string describe() const;

 private:
  Lagrangian() = default;

  LagrangianKind kind_ = LagrangianKind::kQuadratic;
  double shift_ = 0.0;
  std::shared_ptr<const FinslerMetric> metric_;
  std::shared_ptr<const std::vector<Mat2>> g_;
  std::shared_ptr<const std::vector<double>> potential_;
};

struct LagrangianAudit {
  std::size_t samples = 0;
  // min over samples of L(v+w) + L(v−w) − 2L(v), scaled by |w|⁻².
  double min_second_difference = 0.0;
  // min over samples of (L(1000v)/|1000v|) / (L(v)/|v|) for |v| = 1.
  double min_superlinear_growth = 0.0;
  // min over samples of L + k; always >= positivity_floor().
  double sampled_floor = 0.0;
};

LagrangianAudit lagrangian_audit(const Lagrangian& lagrangian, const DiscreteManifold& manifold,
                                 std::size_t sample_count, std::uint64_t seed = 1);

}  // namespace monge
