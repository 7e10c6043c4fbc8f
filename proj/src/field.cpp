#include "hamlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "hamlab/rng.hpp"

namespace hamlab {
namespace detail {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kFdStep = 1e-6;  // internal central differences for derived fields
}  // namespace

class FieldImpl {
 public:
  explicit FieldImpl(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("field: dimension must be >= 1");
  }
  virtual ~FieldImpl() = default;

  virtual double value(double t, const double* q, const double* p) const = 0;

  virtual void grad_q(double t, const double* q, const double* p, double* out) const {
    Vec qq(q, q + n_);
    for (int i = 0; i < n_; ++i) {
      qq[i] = q[i] + kFdStep;
      const double hi = value(t, qq.data(), p);
      qq[i] = q[i] - kFdStep;
      const double lo = value(t, qq.data(), p);
      qq[i] = q[i];
      out[i] = (hi - lo) / (2.0 * kFdStep);
    }
  }

  virtual void grad_p(double t, const double* q, const double* p, double* out) const {
    Vec pp(p, p + n_);
    for (int i = 0; i < n_; ++i) {
      pp[i] = p[i] + kFdStep;
      const double hi = value(t, q, pp.data());
      pp[i] = p[i] - kFdStep;
      const double lo = value(t, q, pp.data());
      pp[i] = p[i];
      out[i] = (hi - lo) / (2.0 * kFdStep);
    }
  }

  virtual const ProfileFunction* profile_ptr() const { return nullptr; }

  double zero_section_infimum() const {
    std::call_once(zsi_once_, [this] { zsi_ = compute_zsi(); });
    return zsi_;
  }

  int n_;
  bool time_periodic_ = true;
  bool momentum_only_ = false;
  bool analytic_ = true;
  double support_radius_ = 0.9;

 protected:
  virtual double compute_zsi() const { return sampled_zsi(64, 1024); }

  // Dense deterministic sample of H over time x torus x {p = 0}.
  double sampled_zsi(int time_samples, int q_samples) const {
    Vec q(n_, 0.0), p(n_, 0.0);
    double lo = value(0.0, q.data(), p.data());
    for (int jt = 0; jt <= time_samples; ++jt) {
      const double t = static_cast<double>(jt) / time_samples;
      for (int jq = 0; jq < q_samples; ++jq) {
        static const unsigned bases[] = {2, 3, 5, 7, 11, 13};
        for (int i = 0; i < n_; ++i)
          q[i] = halton(static_cast<std::uint64_t>(jq), bases[i % 6]);
        lo = std::min(lo, value(t, q.data(), p.data()));
      }
    }
    return lo;
  }

 private:
  mutable std::once_flag zsi_once_;
  mutable double zsi_ = 0.0;
};

namespace {

class ZeroImpl final : public FieldImpl {
 public:
  explicit ZeroImpl(int n) : FieldImpl(n) {
    momentum_only_ = true;
    support_radius_ = 0.0;
  }
  double value(double, const double*, const double*) const override { return 0.0; }
  void grad_q(double, const double*, const double*, double* out) const override {
    std::fill(out, out + n_, 0.0);
  }
  void grad_p(double, const double*, const double*, double* out) const override {
    std::fill(out, out + n_, 0.0);
  }

 protected:
  double compute_zsi() const override { return 0.0; }
};

class ProfileImpl final : public FieldImpl {
 public:
  ProfileImpl(int n, ProfileFunction f) : FieldImpl(n), f_(std::move(f)) {
    momentum_only_ = true;
    support_radius_ = f_.support_end();
  }

  double value(double, const double*, const double* p) const override {
    return f_.value(radius(p));
  }

  void grad_q(double, const double*, const double*, double* out) const override {
    std::fill(out, out + n_, 0.0);
  }

  void grad_p(double, const double*, const double* p, double* out) const override {
    const double r = radius(p);
    // f'(r)/r -> f''(0) as r -> 0 because f'(0) = 0.
    const double factor = r < 1e-10 ? f_.deriv2(0.0) : f_.deriv(r) / r;
    for (int i = 0; i < n_; ++i) out[i] = factor * p[i];
  }

  const ProfileFunction* profile_ptr() const override { return &f_; }

 protected:
  double compute_zsi() const override { return f_.value(0.0); }

 private:
  double radius(const double* p) const {
    double ss = 0.0;
    for (int i = 0; i < n_; ++i) ss += p[i] * p[i];
    return std::sqrt(ss);
  }
  ProfileFunction f_;
};

ProfileFunction momentum_window() {
  std::vector<Knot> knots;
  emit_constant(knots, 0.0, 0.55, 1.0);
  emit_step(knots, 0.55, 0.9, 1.0, 0.0);
  knots.back() = {knots.back().r, 0.0, 0.0, 0.0};
  return ProfileFunction::from_knots(std::move(knots));
}

class CosBumpImpl final : public FieldImpl {
 public:
  CosBumpImpl(int n, std::vector<std::int64_t> wave, double amp, double phase,
              double wobble)
      : FieldImpl(n),
        wave_(std::move(wave)),
        amp_(amp),
        phase_(phase),
        wobble_(wobble),
        chi_(momentum_window()) {
    if (static_cast<int>(wave_.size()) != n)
      throw std::invalid_argument("cosine_bump: wave length != n");
    momentum_only_ = wobble_ == 0.0 &&
                     std::all_of(wave_.begin(), wave_.end(),
                                 [](std::int64_t w) { return w == 0; });
    support_radius_ = chi_.support_end();
  }

  double value(double t, const double* q, const double* p) const override {
    return amp_ * std::cos(kTwoPi * qdot(q) + phase_) * chi_.value(radius(p)) *
           tfactor(t);
  }

  void grad_q(double t, const double* q, const double* p, double* out) const override {
    const double common = -amp_ * kTwoPi * std::sin(kTwoPi * qdot(q) + phase_) *
                          chi_.value(radius(p)) * tfactor(t);
    for (int i = 0; i < n_; ++i) out[i] = common * static_cast<double>(wave_[i]);
  }

  void grad_p(double t, const double* q, const double* p, double* out) const override {
    const double r = radius(p);
    // chi has a flat cap, so chi'(r)/r -> chi''(0) = 0 at the origin.
    const double radial = r < 1e-10 ? 0.0 : chi_.deriv(r) / r;
    const double common =
        amp_ * std::cos(kTwoPi * qdot(q) + phase_) * radial * tfactor(t);
    for (int i = 0; i < n_; ++i) out[i] = common * p[i];
  }

 protected:
  double compute_zsi() const override {
    const bool flat = std::all_of(wave_.begin(), wave_.end(),
                                  [](std::int64_t w) { return w == 0; });
    double lo = 0.0;
    bool first = true;
    for (double cosv : flat ? std::vector<double>{std::cos(phase_)}
                            : std::vector<double>{-1.0, 1.0}) {
      for (double tf : {1.0 - std::fabs(wobble_), 1.0 + std::fabs(wobble_)}) {
        const double v = amp_ * cosv * tf;  // chi(0) = 1
        lo = first ? v : std::min(lo, v);
        first = false;
      }
    }
    return lo;
  }

 private:
  double qdot(const double* q) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += static_cast<double>(wave_[i]) * q[i];
    return s;
  }
  double radius(const double* p) const {
    double ss = 0.0;
    for (int i = 0; i < n_; ++i) ss += p[i] * p[i];
    return std::sqrt(ss);
  }
  double tfactor(double t) const {
    return 1.0 + wobble_ * std::cos(kTwoPi * t);
  }

  std::vector<std::int64_t> wave_;
  double amp_, phase_, wobble_;
  ProfileFunction chi_;
};

class SumImpl final : public FieldImpl {
 public:
  SumImpl(HamiltonianField a, HamiltonianField b)
      : FieldImpl(a.dim()), a_(std::move(a)), b_(std::move(b)) {
    if (a_.dim() != b_.dim()) throw std::invalid_argument("sum_field: dim mismatch");
    time_periodic_ = a_.time_periodic() && b_.time_periodic();
    momentum_only_ = a_.momentum_only() && b_.momentum_only();
    analytic_ = a_.analytic_partials() && b_.analytic_partials();
    support_radius_ = std::max(a_.support_radius(), b_.support_radius());
  }

  double value(double t, const double* q, const double* p) const override {
    return a_.value(t, q, p) + b_.value(t, q, p);
  }
  void grad_q(double t, const double* q, const double* p, double* out) const override {
    Vec tmp(n_);
    a_.grad_q(t, q, p, out);
    b_.grad_q(t, q, p, tmp.data());
    for (int i = 0; i < n_; ++i) out[i] += tmp[i];
  }
  void grad_p(double t, const double* q, const double* p, double* out) const override {
    Vec tmp(n_);
    a_.grad_p(t, q, p, out);
    b_.grad_p(t, q, p, tmp.data());
    for (int i = 0; i < n_; ++i) out[i] += tmp[i];
  }

 private:
  HamiltonianField a_, b_;
};

class IterateImpl final : public FieldImpl {
 public:
  IterateImpl(HamiltonianField base, int k)
      : FieldImpl(base.dim()), base_(std::move(base)), k_(k) {
    time_periodic_ = true;
    momentum_only_ = base_.momentum_only();
    analytic_ = base_.analytic_partials();
    support_radius_ = base_.support_radius();
  }

  double value(double t, const double* q, const double* p) const override {
    return k_ * base_.value(wrap(t), q, p);
  }
  void grad_q(double t, const double* q, const double* p, double* out) const override {
    base_.grad_q(wrap(t), q, p, out);
    for (int i = 0; i < n_; ++i) out[i] *= k_;
  }
  void grad_p(double t, const double* q, const double* p, double* out) const override {
    base_.grad_p(wrap(t), q, p, out);
    for (int i = 0; i < n_; ++i) out[i] *= k_;
  }

 protected:
  double compute_zsi() const override { return k_ * base_.zero_section_infimum(); }

 private:
  double wrap(double t) const {
    const double kt = k_ * t;
    return kt - std::floor(kt);
  }
  HamiltonianField base_;
  double k_;
};

class PeriodizedImpl final : public FieldImpl {
 public:
  PeriodizedImpl(HamiltonianField base, HamiltonianField floor_field)
      : FieldImpl(base.dim()), base_(std::move(base)), floor_(std::move(floor_field)) {
    if (floor_.dim() != base_.dim())
      throw std::invalid_argument("make_periodic: dim mismatch");
    if (!floor_.momentum_only())
      throw std::invalid_argument("make_periodic: floor must be momentum-only");
    time_periodic_ = true;
    momentum_only_ = false;
    analytic_ = false;
    support_radius_ = std::max(base_.support_radius(), floor_.support_radius());
  }

  double value(double t, const double* q, const double* p) const override {
    const double u = t - std::floor(t);
    // C2 time ramp, flat outside [0.1, 0.9].
    const Jet tau = ramp_jet((u - 0.1) / 0.8);
    const double taup = tau.fp / 0.8;
    const double fval = floor_.value(0.0, q, p);
    if (taup == 0.0) return fval;
    // Pull the evaluation point back along the floor flow; the floor is
    // momentum-only so only q moves and F itself is conserved.
    Vec y(q, q + n_), gp(n_);
    floor_.grad_p(0.0, q, p, gp.data());
    const double shift = tau.f - u;
    for (int i = 0; i < n_; ++i) y[i] += shift * gp[i];
    return fval + taup * (base_.value(tau.f, y.data(), p) - fval);
  }

 private:
  HamiltonianField base_, floor_;
};

class ComposedImpl final : public FieldImpl {
 public:
  ComposedImpl(HamiltonianField phi, HamiltonianField psi)
      : FieldImpl(phi.dim()), phi_(std::move(phi)), psi_(std::move(psi)) {
    if (phi_.dim() != psi_.dim())
      throw std::invalid_argument("compose_product: dim mismatch");
    time_periodic_ = false;
    momentum_only_ = false;
    analytic_ = false;
    support_radius_ = std::max(phi_.support_radius(), psi_.support_radius());
  }

  double value(double t, const double* q, const double* p) const override {
    Vec y(2 * n_);
    std::copy(q, q + n_, y.begin());
    std::copy(p, p + n_, y.begin() + n_);
    pull_back(t, y.data());
    return phi_.value(t, q, p) + psi_.value(t, y.data(), y.data() + n_);
  }

 protected:
  double compute_zsi() const override {
    // The inverse flow makes general evaluations expensive; sample coarser
    // when each value costs an integration.
    return phi_.momentum_only() ? sampled_zsi(64, 1024) : sampled_zsi(8, 64);
  }

 private:
  // x := phi_t^{-1}(x).
  void pull_back(double t, double* x) const {
    if (phi_.momentum_only()) {
      Vec gp(n_);
      phi_.grad_p(0.0, x, x + n_, gp.data());
      for (int i = 0; i < n_; ++i) x[i] -= t * gp[i];
      return;
    }
    // Implicit midpoint from s = t back to 0, same scheme as the flow module.
    if (t == 0.0) return;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(t) / 1e-3)));
    const double dt = -t / steps;
    Vec mid(2 * n_), rhs(2 * n_);
    double s = t;
    for (int step = 0; step < steps; ++step) {
      const double tm = s + 0.5 * dt;
      std::copy(x, x + 2 * n_, mid.begin());
      for (int it = 0; it < 50; ++it) {
        phi_.rhs(tm, mid.data(), rhs.data());
        double delta = 0.0;
        for (int i = 0; i < 2 * n_; ++i) {
          const double want = x[i] + 0.5 * dt * rhs[i];
          delta = std::max(delta, std::fabs(want - mid[i]));
          mid[i] = want;
        }
        if (delta <= 1e-12) break;
      }
      for (int i = 0; i < 2 * n_; ++i) x[i] = 2.0 * mid[i] - x[i];
      s += dt;
    }
  }

  HamiltonianField phi_, psi_;
};

}  // namespace
}  // namespace detail

HamiltonianField wrap_impl(std::shared_ptr<const detail::FieldImpl> impl) {
  HamiltonianField f;
  f.impl_ = std::move(impl);
  return f;
}

int HamiltonianField::dim() const { return impl_->n_; }
bool HamiltonianField::time_periodic() const { return impl_->time_periodic_; }
bool HamiltonianField::momentum_only() const { return impl_->momentum_only_; }
bool HamiltonianField::analytic_partials() const { return impl_->analytic_; }
double HamiltonianField::support_radius() const { return impl_->support_radius_; }
double HamiltonianField::zero_section_infimum() const {
  return impl_->zero_section_infimum();
}
const ProfileFunction* HamiltonianField::profile() const {
  return impl_->profile_ptr();
}

double HamiltonianField::value(double t, const double* q, const double* p) const {
  return impl_->value(t, q, p);
}
void HamiltonianField::grad_q(double t, const double* q, const double* p,
                              double* out) const {
  impl_->grad_q(t, q, p, out);
}
void HamiltonianField::grad_p(double t, const double* q, const double* p,
                              double* out) const {
  impl_->grad_p(t, q, p, out);
}

void HamiltonianField::rhs(double t, const double* x, double* dx) const {
  const int n = impl_->n_;
  impl_->grad_p(t, x, x + n, dx);           // dq/dt = dH/dp
  impl_->grad_q(t, x, x + n, dx + n);       // dp/dt = -dH/dq
  for (int i = 0; i < n; ++i) dx[n + i] = -dx[n + i];
}

double HamiltonianField::value(double t, const Vec& q, const Vec& p) const {
  return impl_->value(t, q.data(), p.data());
}
Vec HamiltonianField::grad_q(double t, const Vec& q, const Vec& p) const {
  Vec out(impl_->n_);
  impl_->grad_q(t, q.data(), p.data(), out.data());
  return out;
}
Vec HamiltonianField::grad_p(double t, const Vec& q, const Vec& p) const {
  Vec out(impl_->n_);
  impl_->grad_p(t, q.data(), p.data(), out.data());
  return out;
}

HamiltonianField zero_field(int n) {
  return wrap_impl(std::make_shared<detail::ZeroImpl>(n));
}

HamiltonianField make_momentum_hamiltonian(int n, ProfileFunction f) {
  return wrap_impl(std::make_shared<detail::ProfileImpl>(n, std::move(f)));
}

HamiltonianField cosine_bump(int n, std::vector<std::int64_t> wave, double amp,
                             double phase, double time_wobble) {
  return wrap_impl(std::make_shared<detail::CosBumpImpl>(n, std::move(wave), amp,
                                                         phase, time_wobble));
}

HamiltonianField sum_field(HamiltonianField a, HamiltonianField b) {
  return wrap_impl(std::make_shared<detail::SumImpl>(std::move(a), std::move(b)));
}

HamiltonianField iterate_hamiltonian(const HamiltonianField& base, int k) {
  if (k < 1) throw std::invalid_argument("iterate_hamiltonian: k must be >= 1");
  if (!base.time_periodic())
    throw std::invalid_argument("iterate_hamiltonian: base must be time-periodic");
  if (const ProfileFunction* f = base.profile()) {
    // k f(|p|) is again a profile field; scale the knot states exactly.
    std::vector<Knot> knots = f->knots();
    for (Knot& kn : knots) {
      kn.f *= k;
      kn.fp *= k;
      kn.fpp *= k;
    }
    return make_momentum_hamiltonian(base.dim(),
                                     ProfileFunction::from_knots(std::move(knots)));
  }
  return wrap_impl(std::make_shared<detail::IterateImpl>(base, k));
}

HamiltonianField make_periodic(const HamiltonianField& base,
                               const HamiltonianField& floor_field) {
  return wrap_impl(std::make_shared<detail::PeriodizedImpl>(base, floor_field));
}

HamiltonianField compose_product(const HamiltonianField& phi,
                                 const HamiltonianField& psi) {
  if (phi.momentum_only() && psi.momentum_only()) {
    // psi ignores q, so the pullback by phi's flow is a no-op and the
    // generator is the plain sum (with analytic partials).
    return sum_field(phi, psi);
  }
  return wrap_impl(std::make_shared<detail::ComposedImpl>(phi, psi));
}

double max_partial_mismatch(const HamiltonianField& field, std::uint64_t seed,
                            int count) {
  const int n = field.dim();
  const CounterRng rng{seed, 17};
  const double step = 1e-5;
  const double cap = std::max(0.1, 0.9 * std::max(field.support_radius(), 0.1));
  double worst = 0.0;
  Vec q(n), p(n), gq(n), gp(n);
  for (int j = 0; j < count; ++j) {
    const std::uint64_t base = static_cast<std::uint64_t>(j) * 64;
    const double t = rng.uniform(base);
    for (int i = 0; i < n; ++i) {
      q[i] = rng.uniform(base + 1 + i, -1.0, 1.0);
      p[i] = rng.uniform(base + 32 + i, -cap / std::sqrt(double(n)),
                         cap / std::sqrt(double(n)));
    }
    field.grad_q(t, q.data(), p.data(), gq.data());
    field.grad_p(t, q.data(), p.data(), gp.data());
    for (int i = 0; i < n; ++i) {
      Vec qq = q, pp = p;
      qq[i] = q[i] + step;
      double hi = field.value(t, qq.data(), p.data());
      qq[i] = q[i] - step;
      double lo = field.value(t, qq.data(), p.data());
      double fd = (hi - lo) / (2.0 * step);
      worst = std::max(worst, std::fabs(fd - gq[i]) / std::max(1.0, std::fabs(gq[i])));
      pp[i] = p[i] + step;
      hi = field.value(t, q.data(), pp.data());
      pp[i] = p[i] - step;
      lo = field.value(t, q.data(), pp.data());
      fd = (hi - lo) / (2.0 * step);
      worst = std::max(worst, std::fabs(fd - gp[i]) / std::max(1.0, std::fabs(gp[i])));
    }
  }
  return worst;
}

}  // namespace hamlab
