#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "isa/types.hpp"

namespace isa {

// Nonsmooth convex objective: value plus one subgradient per query. The
// subgradient call is non-const because approximate oracles advance an
// internal slack schedule.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;
  virtual double value(const DenseVector& x) const = 0;
  virtual DenseVector subgradient(const DenseVector& x) = 0;
};

double l1_value(const DenseVector& x);

// componentwise sign with sign(0) = 0, the minimum-norm subgradient
DenseVector l1_subgradient(const DenseVector& x);

class L1Objective : public ObjectiveOracle {
 public:
  double value(const DenseVector& x) const override { return l1_value(x); }
  DenseVector subgradient(const DenseVector& x) override { return l1_subgradient(x); }
};

struct PolyhedralPiece {
  DenseVector a;
  double b = 0.0;
};

struct PolyhedralEval {
  double value = 0.0;
  DenseVector subgradient;
  std::size_t active_index = 0;
};

// max-affine objective f(x) = max_i (a_i^T x + b_i); ties broken by lowest index
class PolyhedralObjective : public ObjectiveOracle {
 public:
  explicit PolyhedralObjective(std::vector<PolyhedralPiece> pieces);

  PolyhedralEval eval(const DenseVector& x) const;
  double value(const DenseVector& x) const override { return eval(x).value; }
  DenseVector subgradient(const DenseVector& x) override { return eval(x).subgradient; }
  double sharpness_mu() const { return sharpness_mu_; }
  const std::vector<PolyhedralPiece>& pieces() const { return pieces_; }

 private:
  std::vector<PolyhedralPiece> pieces_;
  double sharpness_mu_ = 0.0;
};

PolyhedralEval polyhedral_eval(const PolyhedralObjective& obj, const DenseVector& x);

using GammaSchedule = std::function<double(int)>;

// Wraps an oracle so each subgradient call returns an element of the
// gamma_k-subdifferential, advancing k per call. For the l1 objective the
// perturbation is constructed directly from the slack budget; for generic
// oracles a random perturbation is kept only if it survives probe checks.
class EpsSubgradientWrapper : public ObjectiveOracle {
 public:
  EpsSubgradientWrapper(std::shared_ptr<ObjectiveOracle> base, GammaSchedule gamma,
                        std::uint64_t seed = 0);

  double value(const DenseVector& x) const override { return base_->value(x); }
  DenseVector subgradient(const DenseVector& x) override;
  int cursor() const { return cursor_; }

 private:
  std::shared_ptr<ObjectiveOracle> base_;
  GammaSchedule gamma_;
  std::uint64_t seed_;
  int cursor_ = 0;
};

std::shared_ptr<ObjectiveOracle> eps_subgradient_wrap(std::shared_ptr<ObjectiveOracle> base,
                                                      GammaSchedule gamma_schedule,
                                                      std::uint64_t seed = 0);

}  // namespace isa
