#pragma once
// Certified upper-bound bookkeeping for generating Hamiltonians. A
// certificate records a sampled oscillation bound (sup - inf over time and
// the whole phase space) and a sampled lower bound over the zero section,
// both padded toward the safe side. Certificates compose under the product
// of the generated maps and support the bound-transfer argument: a generator
// that is large on the zero section, composed with a perturbation of small
// oscillation, keeps a correspondingly reduced zero-section bound.
//
// The true minimal oscillation over all generators of a given map is an
// infimum we cannot compute; everything here is an upper bound from one
// explicit witness, re-audited by fresh sampling at every construction.

#include <cstdint>
#include <string>

#include "hamlab/field.hpp"

namespace hamlab {

struct CertificateError : std::runtime_error {
  explicit CertificateError(const std::string& what) : std::runtime_error(what) {}
};

// Quasi-random audit sweep: space_points Halton samples of (q, p) with q on
// the torus and p in a ball slightly larger than the support radius (so the
// sweep always sees points where the field vanishes), crossed with an
// equispaced time grid when the field is time dependent.
struct SampleSpec {
  int space_points = 10000;
  int time_points = 64;
  std::uint64_t seed = 2026;
};

struct SampledRange {
  double inf = 0.0;
  double sup = 0.0;
};

struct GeneratorCertificate {
  HamiltonianField field;
  // Padded bounds (the certified claims).
  double osc_upper = 0.0;           // >= sup - inf, padded by +1e-6
  double zero_section_lower = 0.0;  // <= inf over {p = 0}, padded by -1e-6
  // Raw sweep extremes kept for audits.
  double sampled_sup = 0.0;
  double sampled_inf = 0.0;
  int space_points = 0;
  int time_points = 0;
  std::uint64_t seed = 0;
  // Human-readable construction chain, e.g. "compose(bump, iterate^3(f))".
  std::string provenance;
};

// Range of G over time x support neighbourhood. Also used by the propagation
// layer to audit perturbation sizes.
SampledRange sample_field_range(const HamiltonianField& G, const SampleSpec& spec);
double sampled_oscillation(const HamiltonianField& G, const SampleSpec& spec = {});

// Infimum sweep restricted to the zero section {p = 0}.
double sample_zero_section_inf(const HamiltonianField& G, const SampleSpec& spec);

// Build a certificate for one generator. Asserts the compact-support sign
// convention (sampled inf <= 0 <= sampled sup; the sweep includes points
// outside the support, where the field is exactly zero).
GeneratorCertificate certify(const HamiltonianField& G, const SampleSpec& spec = {},
                             std::string provenance = "");

// Certificate for the generator of the composed map (a's map after b's map).
// Audits oscillation subadditivity against a fresh sweep and throws if the
// audit fails. Falls back to a coarser sweep when the composed field needs
// internal flow integration per evaluation.
GeneratorCertificate compose_certificates(const GeneratorCertificate& a,
                                          const GeneratorCertificate& b);

// Certificate for the k-th iterate of the generated map (time-compressed
// generator, values scaled by k). Zero-section bound scales with k.
GeneratorCertificate iterate_certificate(const GeneratorCertificate& base, int k);

// Transfer a zero-section lower bound through a small perturbation: base must
// certify zero_section_lower >= c, perturbation must certify osc_upper < a;
// the composed generator then keeps zero_section_lower >= c - a. The claim is
// re-audited by sampling (tolerance 1e-3) and a failed audit throws.
GeneratorCertificate transfer_zero_section_bound(const GeneratorCertificate& base,
                                                 double c,
                                                 const GeneratorCertificate& perturbation,
                                                 double a);

// JSON text with bounds, sample counts, seed and the provenance chain.
std::string certificate_json(const GeneratorCertificate& cert);

}  // namespace hamlab
