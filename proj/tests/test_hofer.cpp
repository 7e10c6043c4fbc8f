#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include "hamlab/families.hpp"
#include "hamlab/field.hpp"
#include "hamlab/hofer.hpp"

using namespace hamlab;

TEST_CASE("range sweep sees the cap and the vanishing tail") {
  HamiltonianField h = make_momentum_hamiltonian(2, cut_parabola(2.0));
  SampledRange r = sample_field_range(h, SampleSpec{});
  CHECK(r.inf == 0.0);  // the sweep includes points outside the support
  CHECK(r.sup > 1.9);
  CHECK(r.sup <= 2.0);
  CHECK(sampled_oscillation(h) == doctest::Approx(r.sup - r.inf).epsilon(1e-12));
}

TEST_CASE("oscillation of a bump is twice its amplitude") {
  HamiltonianField b = cosine_bump(2, {1, 0}, 0.3, 0.0);
  double osc = sampled_oscillation(b);
  CHECK(osc > 0.55);
  CHECK(osc <= 0.6 + 1e-12);
}

TEST_CASE("zero-section infimum sweep") {
  HamiltonianField h = make_momentum_hamiltonian(2, cut_parabola(2.0));
  CHECK(sample_zero_section_inf(h, SampleSpec{}) == 2.0);
  HamiltonianField s = sum_field(h, cosine_bump(2, {1, 0}, 0.3, 0.0));
  CHECK(sample_zero_section_inf(s, SampleSpec{}) ==
        doctest::Approx(1.7).epsilon(1e-3));
}

TEST_CASE("certificates pad toward the safe side and replay exactly") {
  HamiltonianField h = make_momentum_hamiltonian(1, cut_parabola(2.0));
  GeneratorCertificate a = certify(h, SampleSpec{}, "cap");
  CHECK(a.osc_upper ==
        doctest::Approx(a.sampled_sup - a.sampled_inf + 1e-6).epsilon(1e-12));
  CHECK(a.zero_section_lower == doctest::Approx(2.0 - 1e-6).epsilon(1e-9));
  CHECK(a.sampled_inf <= 0.0);
  CHECK(a.sampled_sup >= 0.0);
  CHECK(a.provenance == "cap");

  GeneratorCertificate b = certify(h, SampleSpec{}, "cap");
  CHECK(a.sampled_sup == b.sampled_sup);
  CHECK(a.sampled_inf == b.sampled_inf);
}

TEST_CASE("iterate certificate scales the zero-section bound") {
  GeneratorCertificate base =
      certify(make_momentum_hamiltonian(1, cut_parabola(2.0)), SampleSpec{}, "cap");
  GeneratorCertificate it3 = iterate_certificate(base, 3);
  CHECK(it3.zero_section_lower > 5.99);
  CHECK(it3.zero_section_lower <= 6.0);
  CHECK(it3.osc_upper == doctest::Approx(3.0 * base.osc_upper).epsilon(1e-2));
  CHECK_THROWS(iterate_certificate(base, 0));
}

TEST_CASE("composition audits oscillation subadditivity") {
  GeneratorCertificate a =
      certify(make_momentum_hamiltonian(1, cut_parabola(2.0)), SampleSpec{}, "deep");
  GeneratorCertificate b = certify(
      make_momentum_hamiltonian(1, cut_parabola(1.5, 0.8, 0.9)), SampleSpec{}, "shallow");
  GeneratorCertificate c = compose_certificates(a, b);
  CHECK(c.osc_upper <= a.osc_upper + b.osc_upper + 1e-6);
  // momentum-only factors add pointwise, so the zero section carries the sum
  CHECK(c.zero_section_lower == doctest::Approx(3.5).epsilon(1e-3));
  CHECK(c.provenance.find("compose") != std::string::npos);
}

TEST_CASE("bound transfer through a small perturbation") {
  GeneratorCertificate base = iterate_certificate(
      certify(make_momentum_hamiltonian(1, cut_parabola(2.0)), SampleSpec{}, "cap"), 3);
  GeneratorCertificate pert =
      certify(cosine_bump(1, {1}, 0.1, 0.3), SampleSpec{}, "bump");

  GeneratorCertificate out = transfer_zero_section_bound(base, 5.9, pert, 0.25);
  CHECK(out.zero_section_lower >= 5.9 - 0.25 - 1e-9);

  // claiming more than the base certifies is rejected
  CHECK_THROWS_AS(transfer_zero_section_bound(base, 6.5, pert, 0.25),
                  CertificateError);
  // an oversized perturbation budget violates the oscillation premise
  GeneratorCertificate wide = certify(cosine_bump(1, {1}, 0.4, 0.0), SampleSpec{}, "wide");
  CHECK_THROWS_AS(transfer_zero_section_bound(base, 5.9, wide, 0.25),
                  CertificateError);
}

TEST_CASE("certificate JSON carries the claims and provenance") {
  GeneratorCertificate cert =
      certify(make_momentum_hamiltonian(1, cut_parabola(2.0)), SampleSpec{}, "cap");
  auto j = nlohmann::json::parse(certificate_json(cert));
  CHECK(j.at("osc_upper").get<double>() == doctest::Approx(cert.osc_upper));
  CHECK(j.at("zero_section_lower").get<double>() ==
        doctest::Approx(cert.zero_section_lower));
  CHECK(j.at("provenance").get<std::string>() == "cap");
  CHECK(j.at("space_points").get<int>() == cert.space_points);
  CHECK(j.at("seed").get<std::uint64_t>() == cert.seed);
}
