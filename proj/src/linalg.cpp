#include "isa/linalg.hpp"

#include <cmath>

#include "isa/rng.hpp"

namespace isa {

DenseVector matvec(const DenseMatrix& A, const DenseVector& x) {
  if (x.size() != A.cols()) throw UsageError("matvec: dimension mismatch");
  return A * x;
}

CgResult cg_solve(const LinearOperator& apply_M, const DenseVector& rhs, const CgStop& stop) {
  if (!stop.residual_threshold && !stop.max_iterations)
    throw UsageError("cg_solve: no stopping rule given");
  if (stop.residual_threshold && *stop.residual_threshold < 0.0)
    throw UsageError("cg_solve: negative residual threshold");
  if (stop.max_iterations && *stop.max_iterations < 1)
    throw UsageError("cg_solve: max_iterations must be at least 1");
  ensure_finite(rhs, "cg_solve rhs");

  const Eigen::Index n = rhs.size();
  const int hard_cap = 3 * static_cast<int>(n);
  const int limit = stop.max_iterations ? std::min(*stop.max_iterations, hard_cap) : hard_cap;

  CgResult out;
  DenseVector q = DenseVector::Zero(n);
  DenseVector r = rhs;
  DenseVector p = r;
  double rr = r.squaredNorm();

  // best iterate by recursive residual; the raw CG residual norms may
  // oscillate, tracking the minimum keeps the reported sequence monotone
  DenseVector best_q = q;
  double best_rnorm = std::sqrt(rr);

  auto true_residual = [&](const DenseVector& cand) {
    DenseVector res = rhs - apply_M(cand);
    return res.norm();
  };

  if (stop.residual_threshold && best_rnorm <= *stop.residual_threshold) {
    out.q = q;
    out.residual_norm = best_rnorm;  // zero iterate, recursion exact
    out.iterations = 0;
    return out;
  }

  bool best_is_new = false;
  for (int it = 1; it <= limit; ++it) {
    DenseVector Mp = apply_M(p);
    const double pMp = p.dot(Mp);
    if (!Mp.allFinite() || !std::isfinite(pMp))
      throw CgBreakdownError("cg_solve: non-finite operator application", best_q, it - 1);
    if (pMp <= 0.0)
      throw CgBreakdownError("cg_solve: operator lost positive definiteness", best_q, it - 1);
    const double alpha = rr / pMp;
    q += alpha * p;
    r -= alpha * Mp;
    const double rr_new = r.squaredNorm();
    if (!std::isfinite(rr_new))
      throw CgBreakdownError("cg_solve: non-finite residual", best_q, it - 1);
    const double rnorm = std::sqrt(rr_new);
    if (rnorm < best_rnorm) {
      best_rnorm = rnorm;
      best_q = q;
      best_is_new = true;
    }
    out.residual_history.push_back(best_rnorm);
    out.iterations = it;

    if (stop.residual_threshold && best_rnorm <= *stop.residual_threshold && best_is_new) {
      // confirm against recursion drift before accepting the threshold stop
      const double certified = true_residual(best_q);
      best_is_new = false;
      if (certified <= *stop.residual_threshold) {
        out.q = best_q;
        out.residual_norm = certified;
        return out;
      }
    }
    if (rnorm == 0.0) break;

    const double beta = rr_new / rr;
    rr = rr_new;
    p = r + beta * p;
  }

  out.q = best_q;
  out.residual_norm = true_residual(best_q);
  return out;
}

GramFactorization::GramFactorization(DenseMatrix A) : A_(std::move(A)) {
  if (A_.rows() < 1 || A_.cols() < 1) throw UsageError("GramFactorization: empty matrix");
  if (!A_.allFinite()) throw UsageError("GramFactorization: non-finite entries");
  gram_ = A_ * A_.transpose();
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success)
    throw DegenerateInstanceError("GramFactorization: A A^T is not positive definite (rank-deficient rows?)");

  // smallest eigenvalue of A A^T by inverse power iteration on the factor,
  // Rayleigh quotient accepted after two consecutive stable steps
  const Eigen::Index m = gram_.rows();
  Rng rng(0x5eedu);
  DenseVector v = rng.gaussian_vector(m);
  v.normalize();
  double rho = 0.0;
  double rho_prev = -1.0;
  int stable = 0;
  for (int it = 0; it < 50000; ++it) {
    DenseVector w = llt_.solve(v);
    const double wnorm = w.norm();
    if (!std::isfinite(wnorm) || wnorm == 0.0)
      throw DegenerateInstanceError("GramFactorization: inverse iteration diverged, matrix numerically singular");
    v = w / wnorm;
    rho = v.dot(gram_ * v);
    if (std::abs(rho - rho_prev) <= 1e-13 * std::abs(rho)) {
      if (++stable >= 2) break;
    } else {
      stable = 0;
    }
    rho_prev = rho;
  }
  const double scale = gram_.cwiseAbs().maxCoeff();
  if (!std::isfinite(rho) || rho <= 1e-14 * scale)
    throw DegenerateInstanceError("GramFactorization: smallest eigenvalue at rounding level, rank-deficient rows");
  sigma_min_ = std::sqrt(rho);
}

DenseVector GramFactorization::solve(const DenseVector& rhs) const {
  if (rhs.size() != gram_.rows()) throw UsageError("GramFactorization::solve: dimension mismatch");
  return llt_.solve(rhs);
}

DenseVector GramFactorization::apply_gram(const DenseVector& q) const {
  if (q.size() != gram_.rows()) throw UsageError("GramFactorization::apply_gram: dimension mismatch");
  return gram_ * q;
}

DenseMatrix GramFactorization::cholesky_factor() const { return llt_.matrixL(); }

DenseVector solve_gram(const GramFactorization& fact, const DenseVector& rhs) {
  return fact.solve(rhs);
}

double sigma_min(const DenseMatrix& A) { return GramFactorization(A).sigma_min(); }

}  // namespace isa
