#include <doctest.h>

#include <memory>

#include "isa/oracles.hpp"
#include "test_helpers.hpp"

using namespace isa;

namespace {

DenseVector vec(std::initializer_list<double> vals) {
  DenseVector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("l1 value") {
  CHECK(l1_value(vec({0, 0, 0})) == 0.0);
  CHECK(l1_value(vec({3, -2, 0})) == 5.0);
  CHECK(l1_value(vec({-1, -1, -1, -1})) == 4.0);
}

TEST_CASE("l1 subgradient is the sign vector with sign(0)=0") {
  DenseVector h = l1_subgradient(vec({3, -2, 0}));
  CHECK(h(0) == 1.0);
  CHECK(h(1) == -1.0);
  CHECK(h(2) == 0.0);
  CHECK(l1_subgradient(DenseVector::Zero(4)).norm() == 0.0);
  CHECK(l1_subgradient(vec({-5}))(0) == -1.0);
}

TEST_CASE("l1 subgradient membership on random points") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    DenseVector x = rng.gaussian_vector(6);
    if (trial % 5 == 0) x(trial % 6) = 0.0;
    DenseVector h = l1_subgradient(x);
    CHECK(h.lpNorm<Eigen::Infinity>() <= 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(h(i) * x(i) == std::abs(x(i)));
  }
}

TEST_CASE("polyhedral evaluation with lowest-index tie break") {
  PolyhedralObjective abs_1d({{vec({1}), 0.0}, {vec({-1}), 0.0}});
  PolyhedralEval at2 = abs_1d.eval(vec({2}));
  CHECK(at2.value == 2.0);
  CHECK(at2.subgradient(0) == 1.0);
  CHECK(at2.active_index == 0);

  PolyhedralEval at0 = abs_1d.eval(vec({0}));
  CHECK(at0.value == 0.0);
  CHECK(at0.subgradient(0) == 1.0);
  CHECK(at0.active_index == 0);

  PolyhedralObjective single({{vec({2}), 1.0}});
  PolyhedralEval at3 = polyhedral_eval(single, vec({3}));
  CHECK(at3.value == 7.0);
  CHECK(at3.subgradient(0) == 2.0);
  CHECK(at3.active_index == 0);
}

TEST_CASE("polyhedral sharpness and validation") {
  PolyhedralObjective obj({{vec({3, 4}), 0.0}, {vec({0, 2}), 1.0}});
  CHECK(obj.sharpness_mu() == doctest::Approx(2.0));
  CHECK_THROWS_AS(PolyhedralObjective{std::vector<PolyhedralPiece>{}}, UsageError);
  CHECK_THROWS_AS(PolyhedralObjective({{vec({0, 0}), 1.0}}), UsageError);
}

TEST_CASE("polyhedral subgradient inequality holds exactly on probes") {
  // integer data keeps every dot product exact in double precision, so the
  // inequality can be asserted with no tolerance at all
  Rng rng(72);
  auto int_vector = [&rng](Eigen::Index n) {
    DenseVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = static_cast<double>(rng.below(11)) - 5.0;
    return v;
  };
  std::vector<PolyhedralPiece> pieces;
  for (int i = 0; i < 5; ++i) {
    DenseVector a = int_vector(3);
    if (a.norm() == 0.0) a(0) = 1.0;
    pieces.push_back({a, static_cast<double>(rng.below(11)) - 5.0});
  }
  PolyhedralObjective obj(pieces);
  for (int trial = 0; trial < 100; ++trial) {
    DenseVector x = int_vector(3);
    DenseVector y = int_vector(3);
    PolyhedralEval ev = obj.eval(x);
    CHECK(obj.value(y) >= ev.value + ev.subgradient.dot(y - x));
  }
}

TEST_CASE("gamma wrapper with zero slack matches the base oracle") {
  auto wrapped = eps_subgradient_wrap(std::make_shared<L1Objective>(), [](int) { return 0.0; }, 5);
  Rng rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    DenseVector x = rng.gaussian_vector(4);
    CHECK(wrapped->subgradient(x) == l1_subgradient(x));
  }
}

TEST_CASE("gamma wrapper rejects negative slack") {
  auto wrapped = eps_subgradient_wrap(std::make_shared<L1Objective>(), [](int) { return -0.5; });
  CHECK_THROWS_AS(wrapped->subgradient(vec({1.0})), UsageError);
}

TEST_CASE("gamma wrapper l1 slack stays within budget") {
  // for the l1 norm, h with |h|_inf <= 1 lies in the gamma-subdifferential
  // iff sum_i (|x_i| - h_i x_i) <= gamma
  const double gamma = 0.5;
  EpsSubgradientWrapper wrapped(std::make_shared<L1Objective>(), [=](int) { return gamma; }, 9);
  Rng rng(74);
  for (int trial = 0; trial < 50; ++trial) {
    DenseVector x = rng.gaussian_vector(5);
    DenseVector h = wrapped.subgradient(x);
    CHECK(h.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-15);
    double slack = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) slack += std::abs(x(i)) - h(i) * x(i);
    CHECK(slack >= -1e-12);
    CHECK(slack <= gamma + 1e-12);
  }
}

TEST_CASE("gamma wrapper 1-d range at x=3") {
  // gamma-subdifferential of |.| at 3 with gamma=0.5 is [1 - 1/6, 1]
  EpsSubgradientWrapper wrapped(std::make_shared<L1Objective>(), [](int) { return 0.5; }, 11);
  for (int trial = 0; trial < 30; ++trial) {
    double h = wrapped.subgradient(vec({3.0}))(0);
    CHECK(h <= 1.0);
    CHECK(h >= 1.0 - 0.5 / 3.0 - 1e-12);
  }
}

TEST_CASE("gamma wrapper probe inequality for l1") {
  const double gamma = 0.5;
  EpsSubgradientWrapper wrapped(std::make_shared<L1Objective>(), [=](int) { return gamma; }, 13);
  Rng rng(75);
  DenseVector x = vec({3, -1, 0, 2});
  DenseVector h = wrapped.subgradient(x);
  const double fx = l1_value(x);
  for (int probe = 0; probe < 100; ++probe) {
    DenseVector y = 10.0 * rng.gaussian_vector(4);
    CHECK(l1_value(y) >= fx + h.dot(y - x) - gamma - 1e-12);
  }
}

TEST_CASE("gamma wrapper generic path survives probe checks") {
  Rng rng(76);
  std::vector<PolyhedralPiece> pieces;
  for (int i = 0; i < 4; ++i) pieces.push_back({rng.gaussian_vector(3), rng.gaussian()});
  auto base = std::make_shared<PolyhedralObjective>(pieces);
  const double gamma = 0.3;
  EpsSubgradientWrapper wrapped(base, [=](int) { return gamma; }, 17);
  for (int trial = 0; trial < 20; ++trial) {
    DenseVector x = rng.gaussian_vector(3);
    DenseVector h = wrapped.subgradient(x);
    const double fx = base->value(x);
    for (int probe = 0; probe < 100; ++probe) {
      DenseVector dir = rng.gaussian_vector(3).normalized();
      DenseVector y = x + (10.0 * rng.uniform()) * dir;
      CHECK(base->value(y) >= fx + h.dot(y - x) - gamma - 1e-12);
    }
  }
}

TEST_CASE("gamma wrapper advances its cursor and is seed deterministic") {
  std::vector<double> gammas = {0.5, 0.1, 0.7};
  auto schedule = [&](int k) { return gammas[static_cast<std::size_t>(k) % gammas.size()]; };
  EpsSubgradientWrapper a(std::make_shared<L1Objective>(), schedule, 21);
  EpsSubgradientWrapper b(std::make_shared<L1Objective>(), schedule, 21);
  Rng rng(77);
  for (int k = 0; k < 6; ++k) {
    DenseVector x = rng.gaussian_vector(4);
    CHECK(a.subgradient(x) == b.subgradient(x));
  }
  CHECK(a.cursor() == 6);
}
