#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "isa/linalg.hpp"
#include "isa/types.hpp"

namespace isa {

using Sequence = std::function<double(int)>;

// Predetermined step/accuracy pair. Families constructed here certify their
// summability conditions analytically: alpha nonsummable but square-summable,
// eps summable, and alpha(k) >= tail_bound(k) >= sum_{j>=k} eps(j).
struct PredeterminedSchedule {
  Sequence alpha;
  Sequence eps;
  Sequence tail_bound;
  std::string tag;
};

// alpha_k = scale_a/(k+1), eps_k = scale_e/(k+2)^2, tail certified by the
// integral estimate scale_e/(k+1); needs scale_e <= scale_a.
PredeterminedSchedule harmonic_pair_schedule(double scale_a, double scale_e);

// relaxed target-gap step lambda_k (f_k - phi) / |h_k|^2
double dynamic_step(double f_k, double phi, double lambda_k, double h_norm_sq);

// Largest projection accuracy that keeps the distance to the optimal set
// nonincreasing when the target phi overestimates the optimal value. Positive
// root of eps^2 + 2(s+d) eps - lambda(2-lambda)(f-phi)^2/|h|^2, evaluated in
// a cancellation-free form; nonincreasing in the distance argument, so any
// upper bound on the true distance is safe to substitute.
double eps_bar(double f_k, double phi, double lambda_k, double h_norm, double dist_bound);

struct EpsTilde {
  double value = 0.0;
  bool negative_discriminant = false;  // no admissible accuracy, use an exact projection
};

// Underestimation counterpart; needs the optimal value (or an estimate) to
// form its gap product. The absolute value of the root is returned.
EpsTilde eps_tilde(double f_k, double phi, double f_star_hint, double lambda_k, double beta,
                   double h_norm, double dist_bound);

Sequence lambda_constant(double value);
Sequence lambda_vanishing(double lambda0);           // lambda0 / (1 + ln(1+k))
Sequence lambda_geometric(double lambda0, double rho);
Sequence nu_default(double nu0);                     // nu0 / (k+1)^2

double distance_bound_strongly_convex(double C, double f_x, double f_star,
                                      double min_subgrad_norm);

// Weak-sharp bound (f - phi)/mu at feasible points; at infeasible points the
// caller supplies a feasibility-distance bound and f evaluated at its
// feasible estimate, and the two pieces chain.
double distance_bound_weak_sharp(double mu, double f_x, double phi, double d_X_bound,
                                 bool at_feasible);

// 2 |Ax - b| / sigma_min + (f - phi) / sqrt(n)
double distance_bound_bp(const GramFactorization& fact, const DenseVector& b,
                         const DenseVector& x, double f_x, double phi);

// Upper bound on the distance from x to the optimal set.
class DistanceBound {
 public:
  virtual ~DistanceBound() = default;
  virtual double bound(const DenseVector& x, double f_x) const = 0;
  virtual std::string kind() const = 0;
};

// exact distance to a known singleton optimal set
class KnownOptimumDistance : public DistanceBound {
 public:
  explicit KnownOptimumDistance(DenseVector x_star);
  double bound(const DenseVector& x, double f_x) const override;
  std::string kind() const override { return "known_optimum"; }

 private:
  DenseVector x_star_;
};

class BpDistance : public DistanceBound {
 public:
  BpDistance(std::shared_ptr<const GramFactorization> fact, DenseVector b, double phi);
  double bound(const DenseVector& x, double f_x) const override;
  std::string kind() const override { return "bp"; }

 private:
  std::shared_ptr<const GramFactorization> fact_;
  DenseVector b_;
  double phi_;
};

// config tags: theorem_over, theorem_under, fixed_cg:J, fixed_eps:V
enum class AccuracyMode { OverestimationBound, UnderestimationBound, FixedCg, FixedEps };

struct DynamicConfig {
  double phi = 0.0;
  Sequence lambda;  // values in (0, beta]
  double beta = 1.0;
  Sequence nu;  // summable cap on the accuracy, applied in the bound-driven modes
  AccuracyMode accuracy = AccuracyMode::FixedEps;
  int fixed_cg_iters = 2;
  double fixed_eps_value = 0.0;
  std::shared_ptr<const DistanceBound> distance_bound;
  std::optional<double> f_star_hint;

  void validate() const;
};

}  // namespace isa
