#include <doctest.h>

#include <cmath>
#include <cstring>

#include "distill/closedform.hpp"
#include "distill/protocols.hpp"
#include "helpers.hpp"

using namespace distill;

namespace {

ProtocolParams params_at(double f, double a2) {
  ProtocolParams p;
  p.fidelity = f;
  p.alpha2 = a2;
  return p;
}

double bitflip_f(double f) { return f * f / (f * f + (1 - f) * (1 - f)); }
double bitflip_p(double f, double a2) {
  return 2 * a2 * (1 - a2) * (f * f + (1 - f) * (1 - f));
}

}  // namespace

TEST_CASE("bit-flip distillation") {
  SUBCASE("reference point") {
    auto out = distill_bitflip(params_at(0.75, 0.25));
    CHECK(out.fidelity_out == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(out.success_probability == doctest::Approx(0.234375).epsilon(1e-9));
    CHECK(!out.below_threshold);
  }

  SUBCASE("pure input keeps fidelity one") {
    auto out = distill_bitflip(params_at(1.0, 0.3));
    CHECK(out.fidelity_out == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.success_probability == doctest::Approx(2 * 0.3 * 0.7).epsilon(1e-9));
  }

  SUBCASE("balanced coefficients") {
    auto out = distill_bitflip(params_at(0.75, 0.5));
    CHECK(out.success_probability == doctest::Approx(0.3125).epsilon(1e-9));
  }

  SUBCASE("closed-form equivalence over the parameter grid") {
    for (int fi = 0; fi <= 10; ++fi) {
      for (int ai = 1; ai <= 10; ++ai) {
        const double f = 0.5 + 0.05 * fi;
        const double a2 = 0.05 * ai;
        auto out = distill_bitflip(params_at(std::min(f, 1.0), std::min(a2, 0.5)));
        CHECK(std::abs(out.fidelity_out - bitflip_f(std::min(f, 1.0))) < 1e-9);
        CHECK(std::abs(out.success_probability -
                       bitflip_p(std::min(f, 1.0), std::min(a2, 0.5))) < 1e-9);
      }
    }
  }

  SUBCASE("cross combinations never survive selection") {
    auto out = distill_bitflip(params_at(0.7, 0.3));
    int cross_branches = 0;
    for (const auto& sel : out.selection) {
      if (sel.label == "Phi+ x Psi+" || sel.label == "Psi+ x Phi+") {
        ++cross_branches;
        CHECK(sel.postselect_probability == 0.0);
      }
    }
    CHECK(cross_branches == 2);
  }

  SUBCASE("output fidelity is strictly increasing in F above one half") {
    double prev = 0.5;
    for (int fi = 1; fi <= 9; ++fi) {
      const double f = 0.5 + 0.05 * fi;
      auto out = distill_bitflip(params_at(f, 0.25));
      CHECK(out.fidelity_out > prev);
      prev = out.fidelity_out;
    }
  }

  SUBCASE("below-threshold flag") {
    CHECK(distill_bitflip(params_at(0.45, 0.25)).below_threshold);
    CHECK(distill_bitflip(params_at(0.5, 0.25)).below_threshold);
  }

  SUBCASE("fixed point at one half") {
    auto out = distill_bitflip(params_at(0.5, 0.25));
    CHECK(out.fidelity_out == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(distill_bitflip(params_at(1.5, 0.25)), std::domain_error);
    CHECK_THROWS_AS(distill_bitflip(params_at(0.75, 0.0)), std::domain_error);
    CHECK_THROWS_AS(distill_bitflip(params_at(0.75, 1.0)), std::domain_error);
  }
}

TEST_CASE("phase-flip concentration stage") {
  SUBCASE("output weights at the reference point") {
    auto out = distill_phaseflip_stage1(params_at(0.75, 0.25));
    CHECK(out.fidelity_out == doctest::Approx(0.625).epsilon(1e-9));
    CHECK(out.success_probability == doctest::Approx(0.375).epsilon(1e-9));
    REQUIRE(out.output.size() == 2);
    // Weight on the +-phase pair and the --phase pair.
    double w_plus = out.fidelity_out;
    CHECK(w_plus == doctest::Approx(0.75 * 0.75 + 0.25 * 0.25).epsilon(1e-9));
  }

  SUBCASE("success probability is independent of F") {
    for (int fi = 0; fi <= 8; ++fi) {
      const double f = 0.55 + 0.05 * fi;
      auto out = distill_phaseflip_stage1(params_at(f, 0.25));
      CHECK(std::abs(out.success_probability - 0.375) < 1e-9);
    }
  }

  SUBCASE("every joint branch survives selection equally") {
    auto out = distill_phaseflip_stage1(params_at(0.7, 0.2));
    for (const auto& sel : out.selection) {
      CHECK(sel.postselect_probability ==
            doctest::Approx(2 * 0.2 * 0.8).epsilon(1e-9));
    }
  }

  SUBCASE("pure input stays pure") {
    auto out = distill_phaseflip_stage1(params_at(1.0, 0.25));
    CHECK(out.fidelity_out == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.output.size() == 1);
  }
}

TEST_CASE("two-stage phase-flip distillation") {
  SUBCASE("composed fidelity at the reference point") {
    auto out = distill_phaseflip_full(params_at(0.75, 0.25));
    const double f1 = 0.625;
    CHECK(out.fidelity_out ==
          doctest::Approx(f1 * f1 / (f1 * f1 + 0.375 * 0.375)).epsilon(1e-9));
    CHECK(out.fidelity_out == doctest::Approx(0.7352941176470588).epsilon(1e-9));
    REQUIRE(out.stage_reports.size() == 2);
    CHECK(out.stage_reports[0].success_probability == doctest::Approx(0.375));
    CHECK(out.stage_reports[0].fidelity_out == doctest::Approx(0.625));
  }

  SUBCASE("pure input is a fixed point") {
    CHECK(distill_phaseflip_full(params_at(1.0, 0.25)).fidelity_out ==
          doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("F = 1/2 is a fixed point") {
    CHECK(distill_phaseflip_full(params_at(0.5, 0.25)).fidelity_out ==
          doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("multipartite distillation") {
  SUBCASE("N = 2 agrees with the bipartite driver field for field") {
    auto params = params_at(0.7, 0.3);
    params.parties = 2;
    auto bi = distill_bitflip(params);
    auto multi = distill_multipartite(params);
    CHECK(std::abs(bi.success_probability - multi.success_probability) < 1e-12);
    CHECK(std::abs(bi.fidelity_out - multi.fidelity_out) < 1e-12);
    REQUIRE(bi.selection.size() == multi.selection.size());
    for (std::size_t i = 0; i < bi.selection.size(); ++i) {
      CHECK(std::abs(bi.selection[i].postselect_probability -
                     multi.selection[i].postselect_probability) < 1e-12);
    }
    REQUIRE(bi.output.size() == multi.output.size());
    for (std::size_t i = 0; i < bi.output.size(); ++i) {
      CHECK(std::abs(bi.output.branches()[i].weight -
                     multi.output.branches()[i].weight) < 1e-12);
    }
  }

  SUBCASE("fidelity is party-count independent") {
    for (int n : {2, 3, 4}) {
      auto params = params_at(0.75, 0.25);
      params.parties = n;
      auto out = distill_multipartite(params);
      CHECK(out.fidelity_out == doctest::Approx(0.9).epsilon(1e-9));
    }
  }

  SUBCASE("cross combinations are eliminated for N = 3") {
    auto params = params_at(0.75, 0.25);
    params.parties = 3;
    auto out = distill_multipartite(params);
    for (const auto& sel : out.selection) {
      if (sel.label == "Phi+ x Psi+" || sel.label == "Psi+ x Phi+") {
        CHECK(sel.postselect_probability == 0.0);
      }
    }
  }

  SUBCASE("simulated success probability follows the bipartite expression") {
    // No closed form is asserted for N > 2; this observes that the simulated
    // value reproduces the same term structure.
    for (int n : {3, 4}) {
      auto params = params_at(0.8, 0.2);
      params.parties = n;
      auto out = distill_multipartite(params);
      CHECK(out.success_probability == doctest::Approx(bitflip_p(0.8, 0.2)).epsilon(1e-9));
    }
  }

  SUBCASE("photon-count cap") {
    auto params = params_at(0.75, 0.25);
    params.parties = 7;
    CHECK_THROWS_AS(distill_multipartite(params), std::domain_error);
    params.parties = 6;
    CHECK_NOTHROW(distill_multipartite(params));
  }
}

TEST_CASE("down-conversion source distillation") {
  SUBCASE("paper weighting reproduces the enhanced fidelity") {
    auto params = params_at(0.75, 0.25);
    auto out = distill_spdc(params);
    CHECK(out.fidelity_out == doctest::Approx(2.5625 / 2.625).epsilon(1e-9));
  }

  SUBCASE("pure input gives fidelity one") {
    CHECK(distill_spdc(params_at(1.0, 0.25)).fidelity_out ==
          doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("paper weighting dominates the ideal source pointwise") {
    for (int fi = 1; fi <= 9; ++fi) {
      const double f = 0.5 + 0.05 * fi;
      auto out = distill_spdc(params_at(f, 0.25));
      CHECK(out.fidelity_out > bitflip_f(f) + 1e-6);
    }
  }

  SUBCASE("physical weighting runs and still beats the ideal source") {
    for (int fi = 0; fi <= 10; fi += 2) {
      auto params = params_at(std::min(0.5 + 0.05 * fi, 1.0), 0.25);
      params.weighting = Weighting::Physical;
      auto out = distill_spdc(params);
      CHECK(out.fidelity_out >= bitflip_f(params.fidelity) - 1e-12);
      CHECK(out.fidelity_out <= 1.0 + 1e-12);
    }
  }

  SUBCASE("a pi phase between the passes degrades the same-mode gain") {
    auto aligned = distill_spdc(params_at(0.75, 0.25));
    auto params = params_at(0.75, 0.25);
    params.delta = M_PI;
    auto misaligned = distill_spdc(params);
    CHECK(misaligned.fidelity_out < aligned.fidelity_out);
  }

  SUBCASE("emission-order bookkeeping is reported") {
    auto params = params_at(0.75, 0.25);
    params.spdc_p = 0.1;
    auto out = distill_spdc(params);
    CHECK(out.extras.at("vacuum_weight") > 0.9);
    CHECK(out.extras.at("per_pulse_success") < 1e-3);
    CHECK(out.extras.at("discarded_weight") ==
          doctest::Approx(1.0 - out.extras.at("per_pulse_success")));
  }
}

TEST_CASE("monte carlo validator") {
  SUBCASE("estimate lands within three sigma at the reference point") {
    auto est = mc_validate(Protocol::BitFlip, params_at(0.75, 0.25), 100000, 12345);
    CHECK(std::abs(est.success_probability - 0.234375) <= 3.0 * est.success_stderr);
    CHECK(std::abs(est.fidelity - 0.9) <= 4.0 * std::max(est.fidelity_stderr, 1e-6));
  }

  SUBCASE("single trial yields a zero-or-one estimate") {
    auto est = mc_validate(Protocol::BitFlip, params_at(0.75, 0.25), 1, 9);
    CHECK((est.success_probability == 0.0 || est.success_probability == 1.0));
  }

  SUBCASE("same seed is bit-identical") {
    auto e1 = mc_validate(Protocol::Spdc, params_at(0.8, 0.3), 20000, 4242);
    auto e2 = mc_validate(Protocol::Spdc, params_at(0.8, 0.3), 20000, 4242);
    CHECK(std::memcmp(&e1, &e2, sizeof(e1)) == 0);
  }

  SUBCASE("trials must be positive") {
    CHECK_THROWS_AS(mc_validate(Protocol::BitFlip, params_at(0.75, 0.25), 0, 1),
                    std::domain_error);
  }

  SUBCASE("every protocol is covered") {
    for (auto protocol : {Protocol::BitFlip, Protocol::PhaseFlipStage1,
                          Protocol::PhaseFlipFull, Protocol::Multipartite,
                          Protocol::Spdc}) {
      auto params = params_at(0.75, 0.25);
      if (protocol == Protocol::Multipartite) params.parties = 3;
      auto exact = run_protocol(protocol, params).success_probability;
      auto est = mc_validate(protocol, params, 50000, 777);
      CHECK(std::abs(est.success_probability - exact) <=
            4.0 * std::max(est.success_stderr, 1e-12));
    }
  }
}

TEST_CASE("transformation efficiency of the bit-flip round") {
  SUBCASE("concurrence measure cancels the fidelity dependence") {
    const double expected = std::sqrt(0.25 * 0.75) / 2.0;
    for (int fi = 0; fi <= 8; ++fi) {
      const double f = 0.55 + 0.05 * fi;
      auto breakdown = bitflip_efficiency(params_at(f, 0.25), MeasureKind::Concurrence);
      CHECK(std::abs(breakdown.eta - expected) < 1e-9);
    }
  }

  SUBCASE("balanced pure input") {
    auto breakdown = bitflip_efficiency(params_at(1.0, 0.5), MeasureKind::Concurrence);
    CHECK(breakdown.eta == doctest::Approx(0.25).epsilon(1e-9));
    auto entropy_based = bitflip_efficiency(params_at(1.0, 0.5), MeasureKind::Entropy);
    CHECK(entropy_based.eta == doctest::Approx(0.25).epsilon(1e-9));
  }

  SUBCASE("entropy measure rejects mixed inputs") {
    CHECK_THROWS_AS(bitflip_efficiency(params_at(0.75, 0.25), MeasureKind::Entropy),
                    std::domain_error);
  }

  SUBCASE("separable input has undefined efficiency") {
    CHECK_THROWS_AS(bitflip_efficiency(params_at(0.5, 0.25), MeasureKind::Concurrence),
                    std::domain_error);
  }
}

TEST_CASE("F = 1/2 is a fidelity fixed point for the label-mixture protocols") {
  // The two-pass source model is the deliberate exception: its same-mode
  // contribution lifts the output fidelity above 1/2 even at F = 1/2.
  for (auto protocol : {Protocol::BitFlip, Protocol::PhaseFlipStage1,
                        Protocol::PhaseFlipFull, Protocol::Multipartite}) {
    auto params = params_at(0.5, 0.25);
    if (protocol == Protocol::Multipartite) params.parties = 3;
    CHECK(run_protocol(protocol, params).fidelity_out ==
          doctest::Approx(0.5).epsilon(1e-9));
  }
  CHECK(distill_spdc(params_at(0.5, 0.25)).fidelity_out ==
        doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("protocol names resolve strictly") {
  CHECK(protocol_from_string("bitflip") == Protocol::BitFlip);
  CHECK(protocol_from_string("phaseflip-full") == Protocol::PhaseFlipFull);
  CHECK_THROWS_AS(protocol_from_string("warp"), std::domain_error);
}

TEST_CASE("simulation matches the closed-form layer everywhere both exist") {
  for (int fi = 0; fi <= 5; ++fi) {
    const double f = std::min(0.5 + 0.1 * fi, 1.0);
    for (double a2 : {0.1, 0.3, 0.5}) {
      auto params = params_at(f, a2);
      CHECK(std::abs(distill_bitflip(params).fidelity_out -
                     evaluate(FormulaId::BitflipFidelity, params).value) < 1e-9);
      CHECK(std::abs(distill_bitflip(params).success_probability -
                     evaluate(FormulaId::BitflipProb, params).value) < 1e-9);
      CHECK(std::abs(distill_phaseflip_full(params).fidelity_out -
                     evaluate(FormulaId::PhaseflipFullFidelity, params).value) < 1e-9);
      CHECK(std::abs(distill_spdc(params).fidelity_out -
                     evaluate(FormulaId::SpdcFidelity, params).value) < 1e-9);
    }
  }
}
