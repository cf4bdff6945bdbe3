#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "isa/linalg.hpp"
#include "isa/types.hpp"

namespace isa {

struct ProjectionCertificate {
  double requested_eps = 0.0;
  double certified_error_bound = 0.0;  // upper bound on |point - exact projection|
  int inner_iterations = 0;
  double residual_norm = 0.0;
  bool exact_fallback_taken = false;
  // an inexact projection is only guaranteed closer to the set than the input
  // when its error is below the input's distance; surfaced, never enforced
  bool moved_closer_guaranteed = false;
};

struct ProjectionResult {
  DenseVector point;
  ProjectionCertificate certificate;
};

// Contract: |project(y, eps).point - P_X(y)| <= eps for every y, and
// project(y, 0) is the exact Euclidean projection when supports_exact().
class InexactProjector {
 public:
  virtual ~InexactProjector() = default;
  virtual ProjectionResult project(const DenseVector& y, double eps) const = 0;
  virtual bool supports_exact() const = 0;
  virtual double feasibility_inf(const DenseVector& x) const = 0;
  // truncated-iteration mode; only meaningful for iterative projectors
  virtual ProjectionResult project_fixed_iters(const DenseVector& y, int iters) const;
};

DenseVector affine_project_exact(const GramFactorization& fact, const DenseVector& b,
                                 const DenseVector& z);

// CG on (A A^T) q = A z - b stopped once |r_q| <= sigma_min * eps, which
// certifies |x - P_X(z)| <= |r_q| / sigma_min <= eps for x = z - A^T q.
// Threshold still unmet at the 3m cap: falls back to the factorized solve.
ProjectionResult affine_project_cg(const GramFactorization& fact, const DenseVector& b,
                                   const DenseVector& z, double eps,
                                   std::optional<double> sigma_min_override = {});

ProjectionResult affine_project_fixed_iters(const GramFactorization& fact, const DenseVector& b,
                                            const DenseVector& z, int iters);

DenseVector box_project(const DenseVector& lower, const DenseVector& upper, const DenseVector& z);

// Projector onto {x | A x = b} with a cached factorization. eps = 0 routes to
// the factorized solve, eps > 0 to truncated CG.
class AffineProjector : public InexactProjector {
 public:
  AffineProjector(std::shared_ptr<const GramFactorization> fact, DenseVector b);

  ProjectionResult project(const DenseVector& y, double eps) const override;
  ProjectionResult project_fixed_iters(const DenseVector& y, int iters) const override;
  bool supports_exact() const override { return true; }
  double feasibility_inf(const DenseVector& x) const override;

  const GramFactorization& factorization() const { return *fact_; }
  const DenseVector& rhs() const { return b_; }

 private:
  std::shared_ptr<const GramFactorization> fact_;
  DenseVector b_;
};

class BoxProjector : public InexactProjector {
 public:
  BoxProjector(DenseVector lower, DenseVector upper);

  ProjectionResult project(const DenseVector& y, double eps) const override;
  bool supports_exact() const override { return true; }
  double feasibility_inf(const DenseVector& x) const override;

 private:
  DenseVector lower_;
  DenseVector upper_;
};

// Test double: exact projection plus a seeded perturbation of norm exactly
// 0.99 * min(eps, distance to the set), the worst error the contract admits.
// The direction is derived from (seed, y, eps) so replays are call-order
// independent.
class PerturbedExactProjector : public InexactProjector {
 public:
  PerturbedExactProjector(std::shared_ptr<const InexactProjector> base, std::uint64_t seed);

  ProjectionResult project(const DenseVector& y, double eps) const override;
  bool supports_exact() const override { return true; }
  double feasibility_inf(const DenseVector& x) const override { return base_->feasibility_inf(x); }

 private:
  std::shared_ptr<const InexactProjector> base_;
  std::uint64_t seed_;
};

std::shared_ptr<InexactProjector> perturbed_exact_projector(
    std::shared_ptr<const InexactProjector> base, std::uint64_t seed);

}  // namespace isa
