#include "hamlab/hofer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <json.hpp>

#include "hamlab/kernels.hpp"
#include "hamlab/rng.hpp"

namespace hamlab {

namespace {

constexpr double kPad = 1e-6;

constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

// Deterministic sample of (q, p) pairs: q uniform on the torus cell, p in the
// closed ball of radius rad. Ball points come from rejection inside the
// bounding cube, so the sequence stays reproducible for any accept count.
struct SpaceSample {
  std::vector<double> q;  // ns x n
  std::vector<double> p;  // ns x n
  int ns = 0;
};

SpaceSample sample_space(int n, int ns, double rad, std::uint64_t seed) {
  SpaceSample out;
  out.q.reserve(static_cast<std::size_t>(ns) * n);
  out.p.reserve(static_cast<std::size_t>(ns) * n);
  std::uint64_t idx = 1 + seed % 1000003;
  while (out.ns < ns) {
    double p2 = 0.0;
    double pj[8];
    for (int i = 0; i < n; ++i) {
      pj[i] = rad * (2.0 * halton(idx, kHaltonBases[n + i]) - 1.0);
      p2 += pj[i] * pj[i];
    }
    if (p2 <= rad * rad) {
      for (int i = 0; i < n; ++i) out.q.push_back(halton(idx, kHaltonBases[i]));
      for (int i = 0; i < n; ++i) out.p.push_back(pj[i]);
      ++out.ns;
    }
    ++idx;
  }
  return out;
}

std::vector<double> time_grid(const HamiltonianField& G, int nt) {
  if (!G.time_periodic()) return {0.0};
  std::vector<double> t(nt);
  for (int k = 0; k < nt; ++k) t[k] = static_cast<double>(k) / nt;
  return t;
}

// Composed-map generators that are not closed-form pull the inner flow
// through an integrator on every evaluation; audits on those use a coarser
// sweep so certification stays interactive.
bool needs_internal_flow(const HamiltonianField& first_factor) {
  return !first_factor.momentum_only();
}

SampleSpec reduced(const SampleSpec& spec) {
  SampleSpec r = spec;
  r.space_points = std::min(spec.space_points, 256);
  r.time_points = std::min(spec.time_points, 16);
  return r;
}

std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b) {
  CounterRng rng(a ^ 0x632be59bd9b4e019ull, b);
  return rng.bits(0);
}

}  // namespace

SampledRange sample_field_range(const HamiltonianField& G, const SampleSpec& spec) {
  const int n = G.dim();
  // Slightly past the support radius so the sweep is guaranteed to include
  // points where a compactly supported field is exactly zero.
  const double rad = std::min(0.999, G.support_radius() + 0.02);
  const SpaceSample pts = sample_space(n, spec.space_points, rad, spec.seed);
  const std::vector<double> times = time_grid(G, spec.time_points);
  std::vector<double> vals(pts.ns);
  SampledRange range{0.0, 0.0};
  bool first = true;
  for (double t : times) {
    for (int j = 0; j < pts.ns; ++j)
      vals[j] = G.value(t, &pts.q[static_cast<std::size_t>(j) * n],
                        &pts.p[static_cast<std::size_t>(j) * n]);
    const kern::MinMax mm = kern::ops().minmax(vals.data(), vals.size());
    if (first) {
      range.inf = mm.lo;
      range.sup = mm.hi;
      first = false;
    } else {
      range.inf = std::min(range.inf, mm.lo);
      range.sup = std::max(range.sup, mm.hi);
    }
  }
  return range;
}

double sampled_oscillation(const HamiltonianField& G, const SampleSpec& spec) {
  const SampledRange r = sample_field_range(G, spec);
  return r.sup - r.inf;
}

double sample_zero_section_inf(const HamiltonianField& G, const SampleSpec& spec) {
  const int n = G.dim();
  std::vector<double> zero(n, 0.0);
  std::vector<double> q(n);
  const std::vector<double> times = time_grid(G, spec.time_points);
  std::uint64_t idx = 1 + spec.seed % 1000003;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(spec.space_points) * times.size());
  for (int j = 0; j < spec.space_points; ++j, ++idx) {
    for (int i = 0; i < n; ++i) q[i] = halton(idx, kHaltonBases[i]);
    for (double t : times) vals.push_back(G.value(t, q.data(), zero.data()));
  }
  return kern::ops().minmax(vals.data(), vals.size()).lo;
}

GeneratorCertificate certify(const HamiltonianField& G, const SampleSpec& spec,
                             std::string provenance) {
  const SampledRange range = sample_field_range(G, spec);
  if (!(range.inf <= 0.0 && range.sup >= 0.0))
    throw CertificateError(
        "certify: compactly supported field must straddle zero on the sweep "
        "(inf = " + std::to_string(range.inf) + ", sup = " + std::to_string(range.sup) + ")");
  const double zs = sample_zero_section_inf(G, spec);
  GeneratorCertificate cert{G,
                            (range.sup - range.inf) + kPad,
                            zs - kPad,
                            range.sup,
                            range.inf,
                            spec.space_points,
                            spec.time_points,
                            spec.seed,
                            provenance.empty() ? std::string("field") : std::move(provenance)};
  return cert;
}

GeneratorCertificate compose_certificates(const GeneratorCertificate& a,
                                          const GeneratorCertificate& b) {
  if (a.field.dim() != b.field.dim())
    throw CertificateError("compose_certificates: dimension mismatch");
  HamiltonianField g = compose_product(a.field, b.field);
  SampleSpec spec;
  spec.space_points = std::min(a.space_points, b.space_points);
  spec.time_points = std::max(a.time_points, b.time_points);
  spec.seed = mix_seeds(a.seed, b.seed);
  std::string note;
  if (needs_internal_flow(a.field)) {
    spec = reduced(spec);
    note = " [coarse sweep: inner flow integrated per evaluation]";
  }
  GeneratorCertificate out =
      certify(g, spec, "compose(" + a.provenance + ", " + b.provenance + ")" + note);
  const double budget = a.osc_upper + b.osc_upper + kPad;
  if (out.osc_upper > budget)
    throw CertificateError(
        "compose_certificates: oscillation audit exceeded the subadditive "
        "budget (" + std::to_string(out.osc_upper) + " > " + std::to_string(budget) + ")");
  return out;
}

GeneratorCertificate iterate_certificate(const GeneratorCertificate& base, int k) {
  if (k < 1) throw CertificateError("iterate_certificate: k must be positive");
  HamiltonianField g = iterate_hamiltonian(base.field, k);
  SampleSpec spec{base.space_points, base.time_points, base.seed};
  return certify(g, spec,
                 "iterate^" + std::to_string(k) + "(" + base.provenance + ")");
}

GeneratorCertificate transfer_zero_section_bound(const GeneratorCertificate& base,
                                                 double c,
                                                 const GeneratorCertificate& perturbation,
                                                 double a) {
  if (base.field.dim() != perturbation.field.dim())
    throw CertificateError("transfer_zero_section_bound: dimension mismatch");
  if (!(base.zero_section_lower >= c))
    throw CertificateError(
        "transfer_zero_section_bound: base certifies only " +
        std::to_string(base.zero_section_lower) + " on the zero section, need " +
        std::to_string(c));
  if (!(perturbation.osc_upper < a))
    throw CertificateError(
        "transfer_zero_section_bound: perturbation oscillation " +
        std::to_string(perturbation.osc_upper) + " is not below " + std::to_string(a));
  HamiltonianField g = compose_product(base.field, perturbation.field);
  SampleSpec spec{std::min(base.space_points, perturbation.space_points),
                  std::max(base.time_points, perturbation.time_points),
                  mix_seeds(base.seed ^ 0x5851f42d4c957f2dull, perturbation.seed)};
  if (needs_internal_flow(base.field)) spec = reduced(spec);
  GeneratorCertificate out =
      certify(g, spec,
              "transfer(" + base.provenance + " >= " + std::to_string(c) + ", " +
                  perturbation.provenance + " < " + std::to_string(a) + ")");
  // The transferred bound: inf over the zero section of the composed
  // generator is at least c plus the perturbation's infimum, and a compactly
  // supported perturbation has inf >= -osc.
  const double claimed = c - a;
  if (out.zero_section_lower + kPad < claimed - 1e-3)
    throw CertificateError(
        "transfer_zero_section_bound: audit found zero-section infimum " +
        std::to_string(out.zero_section_lower) + ", claimed bound " +
        std::to_string(claimed));
  return out;
}

std::string certificate_json(const GeneratorCertificate& cert) {
  nlohmann::json j;
  j["osc_upper"] = cert.osc_upper;
  j["zero_section_lower"] = cert.zero_section_lower;
  j["sampled_sup"] = cert.sampled_sup;
  j["sampled_inf"] = cert.sampled_inf;
  j["space_points"] = cert.space_points;
  j["time_points"] = cert.time_points;
  j["seed"] = cert.seed;
  j["provenance"] = cert.provenance;
  j["dim"] = cert.field.dim();
  return j.dump(2);
}

}  // namespace hamlab
