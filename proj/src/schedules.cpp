#include "isa/schedules.hpp"

#include <cmath>
#include <limits>

namespace isa {

namespace {

bool in_open_unit2(double v) { return v > 0.0 && v < 2.0; }

}  // namespace

PredeterminedSchedule harmonic_pair_schedule(double scale_a, double scale_e) {
  if (!(scale_a > 0.0) || !std::isfinite(scale_a)) {
    throw UsageError("harmonic_pair_schedule: step scale must be positive");
  }
  if (!(scale_e >= 0.0) || !std::isfinite(scale_e)) {
    throw UsageError("harmonic_pair_schedule: accuracy scale must be nonnegative");
  }
  if (scale_e > scale_a) {
    // tail certificate scale_e/(k+1) would overshoot alpha_k
    throw UsageError("harmonic_pair_schedule: accuracy scale must not exceed step scale");
  }
  PredeterminedSchedule sched;
  sched.alpha = [scale_a](int k) { return scale_a / static_cast<double>(k + 1); };
  sched.eps = [scale_e](int k) {
    double d = static_cast<double>(k) + 2.0;
    return scale_e / (d * d);
  };
  sched.tail_bound = [scale_e](int k) { return scale_e / static_cast<double>(k + 1); };
  sched.tag = "harmonic_pair";
  return sched;
}

double dynamic_step(double f_k, double phi, double lambda_k, double h_norm_sq) {
  if (!(h_norm_sq > 0.0)) throw UsageError("dynamic_step: subgradient norm must be positive");
  if (!(lambda_k > 0.0)) throw UsageError("dynamic_step: relaxation must be positive");
  if (!(f_k >= phi)) throw UsageError("dynamic_step: objective value below the target");
  return lambda_k * (f_k - phi) / h_norm_sq;
}

double eps_bar(double f_k, double phi, double lambda_k, double h_norm, double dist_bound) {
  if (!in_open_unit2(lambda_k)) throw UsageError("eps_bar: relaxation must lie in (0, 2)");
  if (!(h_norm > 0.0)) throw UsageError("eps_bar: subgradient norm must be positive");
  if (!(dist_bound >= 0.0)) throw UsageError("eps_bar: distance bound must be nonnegative");
  if (!(f_k >= phi)) throw UsageError("eps_bar: objective value below the target");

  double g = (f_k - phi) / h_norm;
  double s = lambda_k * g;
  double c = lambda_k * (2.0 - lambda_k) * g * g;
  if (c == 0.0) return 0.0;
  // positive root of e^2 + 2(s+d)e - c, rationalized to dodge cancellation
  double t = s + dist_bound;
  return c / (t + std::sqrt(t * t + c));
}

EpsTilde eps_tilde(double f_k, double phi, double f_star_hint, double lambda_k, double beta,
                   double h_norm, double dist_bound) {
  if (!in_open_unit2(beta)) throw UsageError("eps_tilde: beta must lie in (0, 2)");
  if (!(lambda_k > 0.0) || lambda_k > beta) {
    throw UsageError("eps_tilde: relaxation must lie in (0, beta]");
  }
  if (!(h_norm > 0.0)) throw UsageError("eps_tilde: subgradient norm must be positive");
  if (!(dist_bound >= 0.0)) throw UsageError("eps_tilde: distance bound must be nonnegative");
  if (!(phi <= f_star_hint)) {
    throw UsageError("eps_tilde: target must not exceed the optimal-value hint");
  }
  if (!(f_k >= phi)) throw UsageError("eps_tilde: objective value below the target");

  double gap = f_k - phi;
  double s = lambda_k * gap / h_norm;
  double m = (f_star_hint - f_k) + beta / (2.0 - beta) * (f_star_hint - phi);
  double L = lambda_k * (2.0 - beta) * gap / (h_norm * h_norm) * m;

  EpsTilde out;
  if (L == 0.0) return out;
  double t = s + dist_bound;
  double disc = t * t - L;
  if (disc < 0.0) {
    out.negative_discriminant = true;
    return out;
  }
  // signed root -(s+d) + sqrt(disc) equals -L / ((s+d) + sqrt(disc))
  out.value = std::abs(L) / (t + std::sqrt(disc));
  return out;
}

Sequence lambda_constant(double value) {
  if (!in_open_unit2(value)) throw UsageError("lambda_constant: value must lie in (0, 2)");
  return [value](int) { return value; };
}

Sequence lambda_vanishing(double lambda0) {
  if (!in_open_unit2(lambda0)) throw UsageError("lambda_vanishing: start must lie in (0, 2)");
  return [lambda0](int k) { return lambda0 / (1.0 + std::log1p(static_cast<double>(k))); };
}

Sequence lambda_geometric(double lambda0, double rho) {
  if (!in_open_unit2(lambda0)) throw UsageError("lambda_geometric: start must lie in (0, 2)");
  if (!(rho > 0.0) || rho > 1.0) throw UsageError("lambda_geometric: ratio must lie in (0, 1]");
  return [lambda0, rho](int k) { return lambda0 * std::pow(rho, static_cast<double>(k)); };
}

Sequence nu_default(double nu0) {
  if (!(nu0 > 0.0) || !std::isfinite(nu0)) throw UsageError("nu_default: scale must be positive");
  return [nu0](int k) {
    double d = static_cast<double>(k) + 1.0;
    return nu0 / (d * d);
  };
}

double distance_bound_strongly_convex(double C, double f_x, double f_star,
                                      double min_subgrad_norm) {
  if (!(C > 0.0)) throw UsageError("distance_bound_strongly_convex: modulus must be positive");
  if (!(f_x >= f_star)) {
    throw UsageError("distance_bound_strongly_convex: value below the optimal value");
  }
  if (!(min_subgrad_norm >= 0.0)) {
    throw UsageError("distance_bound_strongly_convex: subgradient norm must be nonnegative");
  }
  return std::min(std::sqrt((f_x - f_star) / C), min_subgrad_norm / (2.0 * C));
}

double distance_bound_weak_sharp(double mu, double f_x, double phi, double d_X_bound,
                                 bool at_feasible) {
  if (!(mu > 0.0)) throw UsageError("distance_bound_weak_sharp: sharpness must be positive");
  if (!(f_x >= phi)) throw UsageError("distance_bound_weak_sharp: value below the target");
  if (!(d_X_bound >= 0.0)) {
    throw UsageError("distance_bound_weak_sharp: feasibility distance must be nonnegative");
  }
  double gap_part = (f_x - phi) / mu;
  return at_feasible ? gap_part : d_X_bound + gap_part;
}

double distance_bound_bp(const GramFactorization& fact, const DenseVector& b,
                         const DenseVector& x, double f_x, double phi) {
  if (b.size() != fact.rows() || x.size() != fact.cols()) {
    throw UsageError("distance_bound_bp: dimension mismatch");
  }
  double residual = (fact.matrix() * x - b).norm();
  double n = static_cast<double>(fact.cols());
  return 2.0 * residual / fact.sigma_min() + (f_x - phi) / std::sqrt(n);
}

KnownOptimumDistance::KnownOptimumDistance(DenseVector x_star) : x_star_(std::move(x_star)) {
  if (x_star_.size() == 0) throw UsageError("KnownOptimumDistance: empty optimum");
}

double KnownOptimumDistance::bound(const DenseVector& x, double) const {
  if (x.size() != x_star_.size()) throw UsageError("KnownOptimumDistance: dimension mismatch");
  return (x - x_star_).norm();
}

BpDistance::BpDistance(std::shared_ptr<const GramFactorization> fact, DenseVector b, double phi)
    : fact_(std::move(fact)), b_(std::move(b)), phi_(phi) {
  if (!fact_) throw UsageError("BpDistance: missing factorization");
  if (b_.size() != fact_->rows()) throw UsageError("BpDistance: dimension mismatch");
}

double BpDistance::bound(const DenseVector& x, double f_x) const {
  return distance_bound_bp(*fact_, b_, x, f_x, phi_);
}

void DynamicConfig::validate() const {
  if (!std::isfinite(phi)) throw UsageError("dynamic config: target must be finite");
  if (!in_open_unit2(beta)) throw UsageError("dynamic config: beta must lie in (0, 2)");
  if (!lambda) throw UsageError("dynamic config: relaxation sequence missing");
  for (int k : {0, 1, 2, 5, 10, 100, 1000}) {
    double v = lambda(k);
    if (!std::isfinite(v) || !(v > 0.0) || v > beta) {
      throw UsageError("dynamic config: relaxation values must lie in (0, beta]");
    }
  }
  bool bound_mode = accuracy == AccuracyMode::OverestimationBound ||
                    accuracy == AccuracyMode::UnderestimationBound;
  if (bound_mode) {
    if (!distance_bound) throw UsageError("dynamic config: accuracy mode needs a distance bound");
    if (!nu) throw UsageError("dynamic config: accuracy mode needs the summable cap");
    for (int k : {0, 1, 10}) {
      double v = nu(k);
      if (!std::isfinite(v) || !(v >= 0.0)) {
        throw UsageError("dynamic config: accuracy cap values must be nonnegative");
      }
    }
  }
  if (accuracy == AccuracyMode::UnderestimationBound) {
    if (!f_star_hint) throw UsageError("dynamic config: underestimation mode needs an optimal-value hint");
    if (!(phi <= *f_star_hint)) {
      throw UsageError("dynamic config: target must not exceed the optimal-value hint");
    }
  }
  if (accuracy == AccuracyMode::FixedCg && fixed_cg_iters < 1) {
    throw UsageError("dynamic config: fixed inner iteration count must be at least 1");
  }
  if (accuracy == AccuracyMode::FixedEps &&
      (!(fixed_eps_value >= 0.0) || !std::isfinite(fixed_eps_value))) {
    throw UsageError("dynamic config: fixed accuracy must be nonnegative and finite");
  }
}

}  // namespace isa
