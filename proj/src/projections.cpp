#include "isa/projections.hpp"

#include <cmath>
#include <limits>

#include "isa/rng.hpp"

namespace isa {

namespace {

void mark_closeness(ProjectionCertificate& cert, const DenseVector& y, const DenseVector& point) {
  // |y - point| - certified lower-bounds the distance d_X(y); the projection
  // provably moved toward the set when certified error stays below that
  cert.moved_closer_guaranteed = cert.certified_error_bound < (y - point).norm() - cert.certified_error_bound;
}

}  // namespace

ProjectionResult InexactProjector::project_fixed_iters(const DenseVector&, int) const {
  throw UsageError("this projector has no fixed-iteration mode");
}

DenseVector affine_project_exact(const GramFactorization& fact, const DenseVector& b,
                                 const DenseVector& z) {
  if (b.size() != fact.rows()) throw UsageError("affine_project_exact: rhs dimension mismatch");
  if (z.size() != fact.cols()) throw UsageError("affine_project_exact: point dimension mismatch");
  DenseVector q = fact.solve(fact.matrix() * z - b);
  return z - fact.matrix().transpose() * q;
}

ProjectionResult affine_project_cg(const GramFactorization& fact, const DenseVector& b,
                                   const DenseVector& z, double eps,
                                   std::optional<double> sigma_min_override) {
  if (eps < 0.0) throw UsageError("affine_project_cg: negative accuracy");
  if (b.size() != fact.rows()) throw UsageError("affine_project_cg: rhs dimension mismatch");
  if (z.size() != fact.cols()) throw UsageError("affine_project_cg: point dimension mismatch");
  const double sigma = sigma_min_override.value_or(fact.sigma_min());
  if (sigma <= 0.0) throw UsageError("affine_project_cg: sigma_min must be positive");

  const DenseVector target = fact.matrix() * z - b;
  CgStop stop;
  stop.residual_threshold = sigma * eps;
  CgResult cg = cg_solve([&fact](const DenseVector& v) { return fact.apply_gram(v); }, target, stop);

  ProjectionResult out;
  out.certificate.requested_eps = eps;
  out.certificate.inner_iterations = cg.iterations;

  if (cg.residual_norm <= *stop.residual_threshold) {
    out.point = z - fact.matrix().transpose() * cg.q;
    out.certificate.residual_norm = cg.residual_norm;
    out.certificate.certified_error_bound = cg.residual_norm / sigma;
  } else {
    // cap reached without certification; the factorized solve keeps the
    // contract unconditional
    out.point = affine_project_exact(fact, b, z);
    out.certificate.residual_norm = (fact.matrix() * out.point - b).norm();
    out.certificate.certified_error_bound = 0.0;
    out.certificate.exact_fallback_taken = true;
  }
  mark_closeness(out.certificate, z, out.point);
  return out;
}

ProjectionResult affine_project_fixed_iters(const GramFactorization& fact, const DenseVector& b,
                                            const DenseVector& z, int iters) {
  if (iters < 1) throw UsageError("affine_project_fixed_iters: need at least one iteration");
  if (b.size() != fact.rows()) throw UsageError("affine_project_fixed_iters: rhs dimension mismatch");
  if (z.size() != fact.cols()) throw UsageError("affine_project_fixed_iters: point dimension mismatch");

  const DenseVector target = fact.matrix() * z - b;
  CgStop stop;
  stop.max_iterations = iters;
  CgResult cg = cg_solve([&fact](const DenseVector& v) { return fact.apply_gram(v); }, target, stop);

  ProjectionResult out;
  out.point = z - fact.matrix().transpose() * cg.q;
  out.certificate.requested_eps = std::numeric_limits<double>::quiet_NaN();
  out.certificate.inner_iterations = cg.iterations;
  out.certificate.residual_norm = cg.residual_norm;
  out.certificate.certified_error_bound = cg.residual_norm / fact.sigma_min();
  mark_closeness(out.certificate, z, out.point);
  return out;
}

DenseVector box_project(const DenseVector& lower, const DenseVector& upper, const DenseVector& z) {
  if (lower.size() != upper.size() || lower.size() != z.size())
    throw UsageError("box_project: dimension mismatch");
  if ((lower.array() > upper.array()).any()) throw UsageError("box_project: empty box");
  return z.cwiseMax(lower).cwiseMin(upper);
}

AffineProjector::AffineProjector(std::shared_ptr<const GramFactorization> fact, DenseVector b)
    : fact_(std::move(fact)), b_(std::move(b)) {
  if (!fact_) throw UsageError("AffineProjector: null factorization");
  if (b_.size() != fact_->rows()) throw UsageError("AffineProjector: rhs dimension mismatch");
}

ProjectionResult AffineProjector::project(const DenseVector& y, double eps) const {
  if (eps < 0.0) throw UsageError("AffineProjector: negative accuracy");
  if (eps > 0.0) return affine_project_cg(*fact_, b_, y, eps);

  ProjectionResult out;
  out.point = affine_project_exact(*fact_, b_, y);
  out.certificate.requested_eps = 0.0;
  out.certificate.certified_error_bound = 0.0;
  out.certificate.inner_iterations = 0;
  out.certificate.residual_norm = (fact_->matrix() * out.point - b_).norm();
  mark_closeness(out.certificate, y, out.point);
  return out;
}

ProjectionResult AffineProjector::project_fixed_iters(const DenseVector& y, int iters) const {
  return affine_project_fixed_iters(*fact_, b_, y, iters);
}

double AffineProjector::feasibility_inf(const DenseVector& x) const {
  if (x.size() != fact_->cols()) throw UsageError("AffineProjector: point dimension mismatch");
  return (fact_->matrix() * x - b_).lpNorm<Eigen::Infinity>();
}

BoxProjector::BoxProjector(DenseVector lower, DenseVector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw UsageError("BoxProjector: dimension mismatch");
  if ((lower_.array() > upper_.array()).any()) throw UsageError("BoxProjector: empty box");
}

ProjectionResult BoxProjector::project(const DenseVector& y, double eps) const {
  if (eps < 0.0) throw UsageError("BoxProjector: negative accuracy");
  ProjectionResult out;
  out.point = y.cwiseMax(lower_).cwiseMin(upper_);
  out.certificate.requested_eps = eps;
  mark_closeness(out.certificate, y, out.point);
  return out;
}

double BoxProjector::feasibility_inf(const DenseVector& x) const {
  if (x.size() != lower_.size()) throw UsageError("BoxProjector: dimension mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    worst = std::max(worst, lower_(i) - x(i));
    worst = std::max(worst, x(i) - upper_(i));
  }
  return worst;
}

PerturbedExactProjector::PerturbedExactProjector(std::shared_ptr<const InexactProjector> base,
                                                 std::uint64_t seed)
    : base_(std::move(base)), seed_(seed) {
  if (!base_) throw UsageError("PerturbedExactProjector: null base projector");
  if (!base_->supports_exact()) throw UsageError("PerturbedExactProjector: base must support eps = 0");
}

ProjectionResult PerturbedExactProjector::project(const DenseVector& y, double eps) const {
  if (eps < 0.0) throw UsageError("PerturbedExactProjector: negative accuracy");
  ProjectionResult exact = base_->project(y, 0.0);
  if (eps == 0.0) return exact;

  const double distance = (y - exact.point).norm();
  const double radius = 0.99 * std::min(eps, distance);
  ProjectionResult out = exact;
  out.certificate.requested_eps = eps;
  if (radius > 0.0) {
    std::uint64_t h = hash_bytes(y.data(), sizeof(double) * static_cast<std::size_t>(y.size()), seed_);
    h = hash_bytes(&eps, sizeof(eps), h);
    Rng rng(h);
    DenseVector direction = rng.gaussian_vector(y.size());
    const double norm = direction.norm();
    if (norm > 0.0) {
      out.point += (radius / norm) * direction;
      out.certificate.certified_error_bound = radius;
    }
  }
  mark_closeness(out.certificate, y, out.point);
  return out;
}

std::shared_ptr<InexactProjector> perturbed_exact_projector(
    std::shared_ptr<const InexactProjector> base, std::uint64_t seed) {
  return std::make_shared<PerturbedExactProjector>(std::move(base), seed);
}

}  // namespace isa
