#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cuspidal/classify.hpp"
#include "cuspidal/errors.hpp"
#include "oracles.hpp"

using namespace cuspidal;

namespace {

ManipulatorModel chain(double a2, double a3) {
  DHParams p = illustrative_params();
  p.a2 = a2;
  p.a3 = a3;
  return validate_params(p);
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const AnalysisError& e) {
    return e.kind();
  }
  return ErrorKind::NonConvergent;
}

}  // namespace

TEST(Classify, SurfaceValuesAtReferencePoint) {
  const SurfaceValues s = surface_values(1.0, 2.0, 1.0);
  EXPECT_NEAR(s.A, std::sqrt(10.0), 1e-14);
  EXPECT_NEAR(s.B, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(s.E1, 0.5 * (std::sqrt(10.0) - std::sqrt(2.0)), 1e-14);
  EXPECT_NEAR(s.E2, 2.0, 1e-14);
  EXPECT_NEAR(s.E3, 0.5 * (std::sqrt(10.0) + std::sqrt(2.0)), 1e-14);
  EXPECT_NEAR(s.C2, 2.0 / 3.0 * std::sqrt(10.0), 1e-14);
  EXPECT_NEAR(s.c3(), 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_FALSE(s.C4.has_value());
  EXPECT_EQ(kind_of([&] { (void)s.c4(); }), ErrorKind::Undefined);
  // S = 5, D = 3, AB = sqrt(20): C1 = sqrt((5 - 22 / sqrt(20)) / 2).
  EXPECT_NEAR(s.c1(), std::sqrt(0.5 * (5.0 - 22.0 / std::sqrt(20.0))), 1e-14);
}

TEST(Classify, SurfaceValuesShortSecondLink) {
  const SurfaceValues s = surface_values(1.0, 0.5, 1.0);
  EXPECT_FALSE(s.C3.has_value());
  EXPECT_NEAR(s.c4(), 0.5 / 0.5 * s.B, 1e-14);
  EXPECT_EQ(kind_of([] { surface_values(0.0, 1.0, 1.0); }), ErrorKind::InvalidParams);
}

TEST(Classify, SurfacesAreHomogeneous) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> len(0.2, 3.0);
  for (int k = 0; k < 50; ++k) {
    const double a1 = len(rng), a2 = len(rng), d2 = len(rng), f = len(rng);
    const SurfaceValues s = surface_values(a1, a2, d2);
    const SurfaceValues t = surface_values(f * a1, f * a2, f * d2);
    EXPECT_NEAR(t.C2, f * s.C2, 1e-12 * f * s.C2);
    EXPECT_NEAR(t.E1, f * s.E1, 1e-12 * f * s.E3);
    if (s.C1 && t.C1) EXPECT_NEAR(*t.C1, f * *s.C1, 1e-9 * f);
  }
}

TEST(Classify, TopologyTable) {
  EXPECT_EQ(topology_from_counts(0, 0, true), 1);
  EXPECT_EQ(topology_from_counts(4, 2, true), 2);
  EXPECT_EQ(topology_from_counts(4, 0, false), 3);
  EXPECT_EQ(topology_from_counts(4, 2, false), 4);
  EXPECT_EQ(topology_from_counts(2, 1, false), 5);
  EXPECT_EQ(topology_from_counts(2, 3, false), 6);
  EXPECT_EQ(topology_from_counts(4, 4, false), 7);
  EXPECT_EQ(topology_from_counts(0, 0, false), 8);
  EXPECT_EQ(topology_from_counts(0, 2, false), 9);
  EXPECT_EQ(kind_of([] { topology_from_counts(6, 1, false); }), ErrorKind::UnknownTopology);
}

TEST(Classify, ClosedFormDomains) {
  EXPECT_EQ(closed_form_domain(chain(2.0, 0.1)), 1);
  EXPECT_EQ(closed_form_domain(chain(2.0, 1.5)), 2);
  EXPECT_EQ(closed_form_domain(chain(2.0, 2.5)), 3);
  EXPECT_EQ(closed_form_domain(chain(2.0, 3.5)), 4);
  EXPECT_EQ(closed_form_domain(chain(0.5, 1.3)), 5);
  DHParams p = illustrative_params();
  p.d3 = 0.5;
  EXPECT_EQ(kind_of([&] { closed_form_domain(validate_params(p)); }), ErrorKind::NotClassifiable);
}

TEST(Classify, NumericDomainsAgree) {
  for (auto [a2, a3] : {std::pair{2.0, 0.1}, {2.0, 1.5}, {2.0, 2.5}, {2.0, 3.5}, {0.5, 1.3}}) {
    const auto m = chain(a2, a3);
    EXPECT_EQ(classify_domain(m), closed_form_domain(m)) << a2 << ", " << a3;
  }
}

TEST(Classify, ConditionShortcutsSkipTracing) {
  DHParams p = illustrative_params();
  p.a1 = 0.0;
  const auto m = validate_params(p);
  EXPECT_TRUE(is_quadratic(m));
  const ClassificationReport r = classify(m);
  EXPECT_FALSE(r.cuspidal);
  EXPECT_TRUE(r.quadratic);
  EXPECT_EQ(r.conditions, std::vector<int>{3});
  EXPECT_FALSE(r.cusp_count.has_value());
  const CuspidalityVerdict v = is_cuspidal(m);
  EXPECT_FALSE(v.cuspidal);
  EXPECT_EQ(v.condition, 3);
  EXPECT_FALSE(v.numeric_cusps.has_value());
}

TEST(Classify, IllustrativeReport) {
  const auto m = validate_params(illustrative_params());
  const ClassificationReport r = classify(m);
  EXPECT_TRUE(r.cuspidal);
  EXPECT_EQ(r.cusp_count, 4);
  EXPECT_EQ(r.node_count, 0);
  EXPECT_EQ(r.domain, 2);
  EXPECT_EQ(r.topology, 3);
  EXPECT_EQ(r.four_iks, true);
  EXPECT_EQ(r.has_void, false);
  EXPECT_FALSE(r.quadratic);
  EXPECT_EQ(r.c1_variant, "half_outer");
  EXPECT_FALSE(r.discrepancy.has_value());
  EXPECT_TRUE(is_cuspidal(m).cuspidal);
  EXPECT_TRUE(has_four_iks(m));
}

TEST(Classify, ClosedFormOnlyReport) {
  const ClassificationReport r = classify(chain(2.0, 3.5), ClassifyMethod::ClosedForm);
  EXPECT_EQ(r.domain, 4);
  EXPECT_EQ(r.cusp_count, 4);
  EXPECT_TRUE(r.cuspidal);
  EXPECT_FALSE(r.node_count.has_value());
  DHParams p = illustrative_params();
  p.alpha1 = 1.0;
  EXPECT_EQ(kind_of([&] { classify(validate_params(p), ClassifyMethod::ClosedForm); }),
            ErrorKind::NotClassifiable);
}

TEST(Classify, NoncuspidalFifthDomain) {
  const auto m = chain(0.5, 1.3);
  EXPECT_FALSE(is_cuspidal(m).cuspidal);
  EXPECT_EQ(classify(m).cusp_count, 0);
}

TEST(Classify, BifurcationOracleFindsCuspChanges) {
  ScanOptions opts;
  opts.resolution = 512;
  opts.step = 0.1;
  const auto b = bifurcation_oracle(1.0, 1.0, 2.0, 1.8, 3.2, opts);
  ASSERT_GE(b.size(), 2u);
  const SurfaceValues s = surface_values(1.0, 2.0, 1.0);
  EXPECT_NEAR(b.front().a3, s.C2, 1e-3);
  EXPECT_EQ(b.front().cusps_below, 4);
  EXPECT_EQ(b.front().cusps_above, 2);
  EXPECT_NEAR(b.back().a3, s.c3(), 1e-3);
  EXPECT_EQ(b.back().cusps_above, 4);
  EXPECT_EQ(kind_of([] { bifurcation_oracle(1.0, 1.0, 2.0, 2.0, 1.0); }), ErrorKind::InvalidParams);
}
