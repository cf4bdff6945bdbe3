#include "isa/oracles.hpp"

#include <cmath>
#include <limits>

#include "isa/rng.hpp"

namespace isa {

double l1_value(const DenseVector& x) {
  ensure_finite(x, "l1_value");
  return x.lpNorm<1>();
}

DenseVector l1_subgradient(const DenseVector& x) {
  ensure_finite(x, "l1_subgradient");
  DenseVector h(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) h(i) = (x(i) > 0.0) - (x(i) < 0.0);
  return h;
}

PolyhedralObjective::PolyhedralObjective(std::vector<PolyhedralPiece> pieces)
    : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw UsageError("PolyhedralObjective: no pieces");
  const Eigen::Index n = pieces_.front().a.size();
  sharpness_mu_ = std::numeric_limits<double>::infinity();
  for (const PolyhedralPiece& p : pieces_) {
    if (p.a.size() != n) throw UsageError("PolyhedralObjective: inconsistent piece dimensions");
    const double norm = p.a.norm();
    if (norm == 0.0) throw UsageError("PolyhedralObjective: zero slope piece");
    sharpness_mu_ = std::min(sharpness_mu_, norm);
  }
}

PolyhedralEval PolyhedralObjective::eval(const DenseVector& x) const {
  if (x.size() != pieces_.front().a.size()) throw UsageError("PolyhedralObjective: dimension mismatch");
  PolyhedralEval out;
  out.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double v = pieces_[i].a.dot(x) + pieces_[i].b;
    if (v > out.value) {
      out.value = v;
      out.active_index = i;
    }
  }
  out.subgradient = pieces_[out.active_index].a;
  return out;
}

PolyhedralEval polyhedral_eval(const PolyhedralObjective& obj, const DenseVector& x) {
  return obj.eval(x);
}

EpsSubgradientWrapper::EpsSubgradientWrapper(std::shared_ptr<ObjectiveOracle> base,
                                             GammaSchedule gamma, std::uint64_t seed)
    : base_(std::move(base)), gamma_(std::move(gamma)), seed_(seed) {
  if (!base_) throw UsageError("EpsSubgradientWrapper: null base oracle");
  if (!gamma_) throw UsageError("EpsSubgradientWrapper: null slack schedule");
}

DenseVector EpsSubgradientWrapper::subgradient(const DenseVector& x) {
  const int k = cursor_++;
  const double gamma = gamma_(k);
  if (gamma < 0.0) throw UsageError("EpsSubgradientWrapper: negative slack");

  DenseVector h = base_->subgradient(x);
  if (gamma == 0.0) return h;

  Rng rng(hash_bytes(&k, sizeof(k), seed_));

  if (dynamic_cast<L1Objective*>(base_.get()) != nullptr) {
    // For the l1 norm, moving h_i inward from sign(x_i) by d_i costs exactly
    // d_i * |x_i| of slack, so spending at most gamma in total keeps h in the
    // gamma-subdifferential for every y, not just sampled ones.
    double remaining = gamma;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double mag = std::abs(x(i));
      if (mag == 0.0) continue;
      const double d = std::min(2.0, rng.uniform() * remaining / mag);
      h(i) -= (x(i) > 0.0 ? d : -d);
      remaining -= d * mag;
    }
    return h;
  }

  // Generic oracle: try a random perturbation small enough for the probe ball
  // and keep it only if sampled points uphold the slack inequality.
  const double probe_radius = 10.0;
  const double fx = base_->value(x);
  DenseVector direction = rng.gaussian_vector(x.size());
  const double dir_norm = direction.norm();
  if (dir_norm == 0.0) return h;
  direction /= dir_norm;
  double scale = std::min(gamma / (2.0 * probe_radius), 1.0);

  for (int attempt = 0; attempt < 8; ++attempt) {
    DenseVector candidate = h + scale * direction;
    bool ok = true;
    Rng probe_rng(hash_bytes(&attempt, sizeof(attempt), seed_ ^ 0x9e3779b97f4a7c15ull));
    for (int probe = 0; probe < 32 && ok; ++probe) {
      DenseVector offset = probe_rng.gaussian_vector(x.size());
      const double offset_norm = offset.norm();
      if (offset_norm == 0.0) continue;
      DenseVector y = x + (probe_radius * probe_rng.uniform() / offset_norm) * offset;
      ok = base_->value(y) >= fx + candidate.dot(y - x) - gamma;
    }
    if (ok) return candidate;
    scale *= 0.5;
  }
  return h;
}

std::shared_ptr<ObjectiveOracle> eps_subgradient_wrap(std::shared_ptr<ObjectiveOracle> base,
                                                      GammaSchedule gamma_schedule,
                                                      std::uint64_t seed) {
  return std::make_shared<EpsSubgradientWrapper>(std::move(base), std::move(gamma_schedule), seed);
}

}  // namespace isa
