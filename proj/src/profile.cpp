#include "hamlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "hamlab/kernels.hpp"

namespace hamlab {

namespace {

// Quintic Hermite coefficients on [0, h] from endpoint jets.
void hermite_coeff(const Knot& k0, const Knot& k1, double* c) {
  const double h = k1.r - k0.r;
  const double h2 = h * h;
  const double A = k1.f - (k0.f + k0.fp * h + 0.5 * k0.fpp * h2);
  const double B = k1.fp - (k0.fp + k0.fpp * h);
  const double C = k1.fpp - k0.fpp;
  c[0] = k0.f;
  c[1] = k0.fp;
  c[2] = 0.5 * k0.fpp;
  c[3] = (10.0 * A - 4.0 * B * h + 0.5 * C * h2) / (h2 * h);
  c[4] = (-15.0 * A + 7.0 * B * h - C * h2) / (h2 * h2);
  c[5] = (6.0 * A - 3.0 * B * h + 0.5 * C * h2) / (h2 * h2 * h);
}

}  // namespace

ProfileFunction ProfileFunction::from_knots(std::vector<Knot> knots) {
  if (knots.size() < 2)
    throw std::invalid_argument("profile: need at least two knots");
  if (knots.front().r != 0.0)
    throw std::invalid_argument("profile: first knot must sit at r = 0");
  if (knots.front().fp != 0.0)
    throw std::invalid_argument("profile: f'(0) must vanish (even extension)");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].r > knots[i - 1].r))
      throw std::invalid_argument("profile: knot radii must strictly increase");
  const Knot& last = knots.back();
  if (!(last.r < 1.0))
    throw std::invalid_argument("profile: support must end strictly inside r < 1");
  if (last.f != 0.0 || last.fp != 0.0 || last.fpp != 0.0)
    throw std::invalid_argument("profile: last knot state must be identically zero");

  ProfileFunction out;
  out.knots_ = std::move(knots);
  const std::size_t pieces = out.knots_.size() - 1;
  out.coeff_.assign(6 * (pieces + 1), 0.0);  // trailing zero piece beyond support
  for (std::size_t i = 0; i < pieces; ++i)
    hermite_coeff(out.knots_[i], out.knots_[i + 1], out.coeff_.data() + 6 * i);
  return out;
}

std::int32_t ProfileFunction::piece_index(double r) const {
  if (r < 0.0) throw std::domain_error("profile: negative radius");
  if (r >= knots_.back().r)
    return static_cast<std::int32_t>(knots_.size() - 1);  // zero piece
  // Largest knot index with knot.r <= r.
  std::size_t lo = 0, hi = knots_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (knots_[mid].r <= r ? lo : hi) = mid;
  }
  return static_cast<std::int32_t>(lo);
}

Jet ProfileFunction::eval(double r) const {
  const std::int32_t idx = piece_index(r);
  const double u =
      idx < static_cast<std::int32_t>(knots_.size()) - 1 ? r - knots_[idx].r : 0.0;
  Jet jet{};
  kern::scalar_ops().poly_eval(coeff_.data(), &idx, &u, &jet.f, &jet.fp, &jet.fpp, 1);
  return jet;
}

void ProfileFunction::eval_many(const double* r, std::size_t n, double* f, double* fp,
                                double* fpp) const {
  std::vector<std::int32_t> idx(n);
  std::vector<double> u(n);
  const std::int32_t zero_piece = static_cast<std::int32_t>(knots_.size() - 1);
  for (std::size_t j = 0; j < n; ++j) {
    idx[j] = piece_index(r[j]);
    u[j] = idx[j] < zero_piece ? r[j] - knots_[idx[j]].r : 0.0;
  }
  kern::ops().poly_eval(coeff_.data(), idx.data(), u.data(), f, fp, fpp, n);
}

std::string ProfileFunction::serialize() const {
  std::string out = "profile-v1 " + std::to_string(knots_.size()) + "\n";
  char line[128];
  for (const Knot& k : knots_) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", k.r, k.f, k.fp,
                  k.fpp);
    out += line;
  }
  return out;
}

ProfileFunction ProfileFunction::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "profile-v1")
    throw std::invalid_argument("profile: bad header, expected profile-v1");
  std::vector<Knot> knots;
  knots.reserve(count);
  std::string line;
  std::getline(in, line);  // rest of header line
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Knot k{};
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &k.r, &k.f, &k.fp, &k.fpp) != 4)
      throw std::invalid_argument("profile: malformed knot line: " + line);
    knots.push_back(k);
  }
  if (knots.size() != count)
    throw std::invalid_argument("profile: knot count disagrees with header");
  return from_knots(std::move(knots));
}

Jet ramp_jet(double t) {
  // Integral of the quadratic B-spline bell; three cubic pieces.
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  if (t < 1.0 / 3.0) {
    return {4.5 * t * t * t, 13.5 * t * t, 27.0 * t};
  }
  if (t <= 2.0 / 3.0) {
    return {0.5 - 4.5 * t + 13.5 * t * t - 9.0 * t * t * t,
            -4.5 + 27.0 * t - 27.0 * t * t, 27.0 - 54.0 * t};
  }
  const double s = 1.0 - t;
  return {1.0 - 4.5 * s * s * s, 13.5 * s * s, -27.0 * s};
}

double ramp(double t) { return ramp_jet(t).f; }

namespace {

void push_or_check_start(std::vector<Knot>& knots, const Knot& start) {
  if (knots.empty()) {
    knots.push_back(start);
    return;
  }
  const Knot& prev = knots.back();
  if (std::fabs(prev.r - start.r) > 1e-12)
    throw std::invalid_argument("emit: segment start does not abut previous knot");
  // Keep the stored state; analytic constructions agree to round-off and a
  // single state per knot is what guarantees exact C2.
}

}  // namespace

void emit_constant(std::vector<Knot>& knots, double a, double b, double v) {
  if (!(b > a)) throw std::invalid_argument("emit_constant: empty interval");
  push_or_check_start(knots, {a, v, 0.0, 0.0});
  knots.push_back({b, v, 0.0, 0.0});
}

void emit_parabola(std::vector<Knot>& knots, double a, double b, double K) {
  if (!(b > a)) throw std::invalid_argument("emit_parabola: empty interval");
  push_or_check_start(knots, {a, K * (1.0 - a * a), -2.0 * K * a, -2.0 * K});
  knots.push_back({b, K * (1.0 - b * b), -2.0 * K * b, -2.0 * K});
}

void emit_step(std::vector<Knot>& knots, double a, double b, double v0, double v1) {
  if (!(b > a)) throw std::invalid_argument("emit_step: empty interval");
  const double w = b - a, d = v1 - v0;
  push_or_check_start(knots, {a, v0, 0.0, 0.0});
  for (int j = 1; j <= 3; ++j) {
    const double t = j / 3.0;
    const Jet R = ramp_jet(t);
    knots.push_back({a + w * t, v0 + d * R.f, d * R.fp / w, d * R.fpp / (w * w)});
  }
}

void emit_parabola_release(std::vector<Knot>& knots, double a, double b, double K,
                           double L) {
  if (!(b > a)) throw std::invalid_argument("emit_parabola_release: empty interval");
  const double w = b - a;
  auto jet_at = [&](double r) -> Knot {
    const Jet R = ramp_jet((r - a) / w);
    const double P = K * (1.0 - r * r), Pp = -2.0 * K * r, Ppp = -2.0 * K;
    const double W = 1.0 - R.f, Wp = -R.fp / w, Wpp = -R.fpp / (w * w);
    return {r, L + (P - L) * W, Pp * W + (P - L) * Wp,
            Ppp * W + 2.0 * Pp * Wp + (P - L) * Wpp};
  };
  push_or_check_start(knots, jet_at(a));
  for (int j = 1; j <= 3; ++j) knots.push_back(jet_at(a + w * (j / 3.0)));
}

}  // namespace hamlab
