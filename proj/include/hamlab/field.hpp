#pragma once
// Hamiltonian functions H(t, q, p) on the torus phase space, bundled with
// their partial derivatives and the metadata the integrator and experiment
// layers key off (dimension, support radius, time periodicity, whether the
// field depends on momentum only, whether partials are analytic or internal
// finite differences). Instances are immutable value handles over shared
// implementation objects.

#include <cstdint>
#include <memory>
#include <vector>

#include "hamlab/profile.hpp"
#include "hamlab/vec.hpp"

namespace hamlab {

namespace detail {
class FieldImpl;
}

class HamiltonianField {
 public:
  int dim() const;
  bool time_periodic() const;
  // Depends on p alone and is autonomous, so its flow is the exact
  // translation (q, p) -> (q + t dH/dp(p), p).
  bool momentum_only() const;
  // False for derived constructions whose partials are internal central
  // differences (step 1e-6); those are excluded from the analytic-vs-FD
  // consistency contract.
  bool analytic_partials() const;
  double support_radius() const;
  // Infimum of H over time x torus x {p = 0}; analytic where the shape allows,
  // otherwise sampled densely once and cached.
  double zero_section_infimum() const;
  // Non-null iff the field is exactly f(|p|) for a stored profile.
  const ProfileFunction* profile() const;

  double value(double t, const double* q, const double* p) const;
  void grad_q(double t, const double* q, const double* p, double* out) const;
  void grad_p(double t, const double* q, const double* p, double* out) const;
  // Hamiltonian vector field on the flat state x = (q, p):
  // dx = (dH/dp, -dH/dq).
  void rhs(double t, const double* x, double* dx) const;

  double value(double t, const Vec& q, const Vec& p) const;
  Vec grad_q(double t, const Vec& q, const Vec& p) const;
  Vec grad_p(double t, const Vec& q, const Vec& p) const;

 private:
  friend HamiltonianField wrap_impl(std::shared_ptr<const detail::FieldImpl>);
  std::shared_ptr<const detail::FieldImpl> impl_;
};

// H = 0.
HamiltonianField zero_field(int n);

// H(q, p) = f(|p|). dH/dp = (f'(|p|)/|p|) p with the f''(0) p limit at p = 0.
HamiltonianField make_momentum_hamiltonian(int n, ProfileFunction f);

// H = amp cos(2 pi wave.q + phase) chi(|p|) (1 + wobble cos(2 pi t)) where chi
// is a fixed C2 momentum window (plateau to 0.55, zero from 0.9). wave may be
// the zero vector, making the field momentum-only when wobble = 0.
HamiltonianField cosine_bump(int n, std::vector<std::int64_t> wave, double amp,
                             double phase, double time_wobble = 0.0);

// Pointwise sum.
HamiltonianField sum_field(HamiltonianField a, HamiltonianField b);

// k-fold time compression: (t, x) -> k H(k t mod 1, x), the generator of the
// k-th power of H's time-1 map. Requires k >= 1 and a time-periodic base.
HamiltonianField iterate_hamiltonian(const HamiltonianField& base, int k);

// Time-periodic regeneration of base's time-1 map above the floor F: the new
// generator is F + tau'(t) (H_tau(t) - F) pulled back by F's flow, where tau
// is a C2 ramp flat near t = 0 and t = 1. Preserves the zero-section bound
// min(F, inf H) wherever F matches H's floor. Requires a momentum-only F.
HamiltonianField make_periodic(const HamiltonianField& base,
                               const HamiltonianField& floor_field);

// Generator of the composed map phi_t . psi_t: Phi(t, x) + Psi(t, phi_t^-1(x)).
// Momentum-only factors compose in closed form; otherwise the inverse flow is
// integrated internally and partials fall back to finite differences.
HamiltonianField compose_product(const HamiltonianField& phi,
                                 const HamiltonianField& psi);

// Largest relative mismatch between analytic partials and central finite
// differences (step 1e-5) over `count` deterministic sample points. Intended
// for fields with analytic_partials().
double max_partial_mismatch(const HamiltonianField& field, std::uint64_t seed,
                            int count = 100);

}  // namespace hamlab
