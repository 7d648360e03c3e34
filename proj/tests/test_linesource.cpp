#include <gtest/gtest.h>

#include <cmath>

#include "diskrad/linesource.hpp"

using namespace diskrad;

namespace {
double rel(complex a, complex b) { return std::abs(a - b) / std::abs(b); }
Observer polar(double R, double phi) { return Observer(R * std::sin(phi), R * std::cos(phi)); }
}  // namespace

TEST(Observer, GeometryAndPreconditions) {
  const Observer o(3.0, 4.0);
  EXPECT_DOUBLE_EQ(o.R(), 5.0);
  EXPECT_DOUBLE_EQ(o.sin_phi(), 0.6);
  EXPECT_DOUBLE_EQ(o.cos_phi(), 0.8);
  EXPECT_NEAR(o.phi(), std::acos(0.8), 1e-15);
  EXPECT_DOUBLE_EQ(o.mirrored().z(), -4.0);
  EXPECT_DOUBLE_EQ(Observer(2.0, 0.0).phi(), pi / 2);
  EXPECT_THROW(Observer(1.0, 0.0), std::domain_error);
  EXPECT_THROW(Observer(0.5, 2.0), std::domain_error);
  EXPECT_THROW(Observer(2.0, INFINITY), std::domain_error);
}

TEST(LqQuadrature, StaticLimitCollapses) {
  EXPECT_NEAR(lq_quadrature(0, 0.0, Observer(2.0, 0.0)).real(), pi / 2, 1e-12);
}

TEST(LqQuadrature, MatchesInPlaneClosedFormOnGrid) {
  double worst = 0.0;
  for (int q = 0; q <= 15; ++q)
    for (double k : {0.5, 1.0, 2.0, 5.0, 9.0})
      for (double r : {1.25, 2.0, 5.0})
        worst = std::max(worst, rel(lq_quadrature(q, k, Observer(r, 0.0)), lq_inplane_exact(q, k, r)));
  EXPECT_LT(worst, 1e-8);
  EXPECT_LT(rel(lq_quadrature(3, 5.0, Observer(1.25, 0.0)), lq_inplane_exact(3, 5.0, 1.25)), 1e-8);
}

TEST(LqQuadrature, OffPlaneAgreesWithFarFieldForm) {
  const Observer o(1.25, 4.0);
  EXPECT_LT(rel(lq_farfield(1, 2.0, o), lq_quadrature(1, 2.0, o)), 0.02);
}

TEST(LqQuadrature, MirrorSymmetry) {
  for (int q : {0, 1, 4, 11})
    for (double z : {0.3, 2.0, 7.5}) {
      const Observer o(1.25, z);
      EXPECT_EQ(lq_quadrature(q, 5.0, o), lq_quadrature(q, 5.0, o.mirrored())) << q << " " << z;
    }
}

TEST(LqInPlane, ClosedFormValues) {
  EXPECT_NEAR(std::abs(lq_inplane_exact(0, 1e-9, 1.7)), pi / 2, 1e-14);
  EXPECT_EQ(lq_inplane_exact(0, 0.0, 1.7), complex(pi / 2));
  EXPECT_EQ(lq_inplane_exact(3, 0.0, 1.7), complex(0.0));
  EXPECT_NEAR(std::abs(lq_inplane_exact(4, 3.0, 1.25)), 5.0 * pi * std::abs(bessel_j(5, 3.0)) / 3.0, 1e-14);
}

TEST(LqInPlane, OrderTenIsSmallAtKFive) {
  const double ratio = std::abs(lq_inplane_exact(10, 5.0, 1.25)) / std::abs(lq_inplane_exact(0, 5.0, 1.25));
  EXPECT_NEAR(ratio, 11.0 * std::abs(std::cyl_bessel_j(11, 5.0) / std::cyl_bessel_j(1, 5.0)), 1e-14);
  EXPECT_LT(ratio, 1e-2);
}

TEST(LqInPlane, DecaysStrictlyBeyondCutoff) {
  for (double k : {0.5, 1.0, 2.0, 5.0, 9.0}) {
    const int q0 = static_cast<int>(std::ceil(k));
    for (int q = q0; q < q0 + 6; ++q)
      EXPECT_LT(std::abs(lq_inplane_exact(q + 1, k, 1.25)), std::abs(lq_inplane_exact(q, k, 1.25)))
          << "k=" << k << " q=" << q;
  }
}

TEST(LqFarField, AgreesWithQuadratureAtLargeRange) {
  const Observer o(1.25, 50.0);
  EXPECT_LT(rel(lq_farfield(0, 1.0, o), lq_quadrature(0, 1.0, o)), 0.01);
}

// In the plane the exact |L_q| does not depend on r; the far-field form
// carries an extra O(1/R) term, so its error halves as R doubles.
TEST(LqFarField, InPlaneErrorFallsAsOneOverR) {
  auto err = [](double R) { return std::abs(lq_farfield(0, 2.0, Observer(R, 0.0)) - lq_inplane_exact(0, 2.0, R)); };
  EXPECT_NEAR(std::abs(lq_inplane_exact(0, 2.0, 200.0)), std::abs(lq_inplane_exact(0, 2.0, 5.0)), 1e-15);
  EXPECT_NEAR(err(200.0) / err(400.0), 2.0, 1e-2);
}

TEST(LqFarField, OnAxisRejected) {
  EXPECT_THROW(lq_farfield(2, 2.0, Observer(1.25, 1e9)), std::domain_error);
}

TEST(LqFarField, ErrorDecreasesWithRange) {
  double prev = 1e300;
  for (double R : {10.0, 20.0, 40.0, 80.0}) {
    const Observer o = polar(R, pi / 4);
    const double e = rel(lq_farfield(1, 2.0, o), lq_quadrature(1, 2.0, o));
    EXPECT_LT(e, prev) << "R=" << R;
    prev = e;
  }
}

TEST(LqAuto, DispatchRules) {
  const Observer inplane(1.25, 0.0);
  const auto a = lq_auto(3, 5.0, inplane);
  EXPECT_EQ(a.path, LqPath::inplane);
  EXPECT_EQ(a.value, lq_inplane_exact(3, 5.0, 1.25));

  const Observer near(1.25, std::sqrt(9.0 - 1.25 * 1.25));
  EXPECT_EQ(lq_auto(1, 2.0, near).path, LqPath::quadrature);

  const Observer far = polar(100.0, pi / 4);
  const auto f = lq_auto(1, 2.0, far);
  EXPECT_EQ(f.path, LqPath::farfield);
  EXPECT_LT(rel(f.value, lq_quadrature(1, 2.0, far)), 0.005);

  LqPolicy force;
  force.mode = LqPolicy::Mode::quadrature;
  EXPECT_EQ(lq_auto(1, 2.0, inplane, force).path, LqPath::quadrature);
  force.mode = LqPolicy::Mode::closed_form;
  EXPECT_EQ(lq_auto(1, 2.0, near, force).path, LqPath::farfield);
  EXPECT_STREQ(to_string(LqPath::farfield), "farfield");
}

TEST(LqAuto, CountsWork) {
  WorkCounter w;
  lq_auto(2, 1.0, Observer(1.25, 0.0), {}, &w);
  EXPECT_EQ(w.evaluations, 1u);
  lq_auto(2, 1.0, Observer(1.25, 2.0), {}, &w);
  EXPECT_GT(w.evaluations, 15u);
}

TEST(LqQuadrature, HighOrdersAtLargeHeightConverge) {
  for (int q : {11, 15, 20})
    for (double z : {2.0, 8.0, 30.0}) {
      const complex v = lq_quadrature(q, 9.0, Observer(1.25, z));
      EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag())) << q << " " << z;
    }
}
