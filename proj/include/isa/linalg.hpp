#pragma once

#include <Eigen/Cholesky>
#include <functional>
#include <optional>
#include <vector>

#include "isa/types.hpp"

namespace isa {

using LinearOperator = std::function<DenseVector(const DenseVector&)>;

struct CgStop {
  // first satisfied wins; at least one must be set
  std::optional<double> residual_threshold;
  std::optional<int> max_iterations;
};

struct CgResult {
  DenseVector q;
  double residual_norm = 0.0;  // true residual of the returned iterate
  int iterations = 0;
  std::vector<double> residual_history;  // best-so-far after each step, non-increasing
};

// CG met non-finite values; carries the last usable iterate.
class CgBreakdownError : public NumericalError {
 public:
  CgBreakdownError(const std::string& what, DenseVector last_iterate, int iterations)
      : NumericalError(what), last_iterate_(std::move(last_iterate)), iterations_(iterations) {}
  const DenseVector& last_iterate() const { return last_iterate_; }
  int iterations() const { return iterations_; }

 private:
  DenseVector last_iterate_;
  int iterations_;
};

DenseVector matvec(const DenseMatrix& A, const DenseVector& x);

// Conjugate gradients from a zero start on a symmetric positive definite
// operator. The returned iterate is the best one seen by residual norm, and
// residual_norm is recomputed from the operator on exit, so a threshold stop
// certifies a true residual bound. Hard cap: 3 * dim(rhs) steps.
CgResult cg_solve(const LinearOperator& apply_M, const DenseVector& rhs, const CgStop& stop);

// Cholesky factorization of A A^T for a full-row-rank wide matrix, with the
// smallest singular value of A cached at construction.
class GramFactorization {
 public:
  explicit GramFactorization(DenseMatrix A);

  const DenseMatrix& matrix() const { return A_; }
  const DenseMatrix& gram() const { return gram_; }
  Eigen::Index rows() const { return A_.rows(); }
  Eigen::Index cols() const { return A_.cols(); }

  DenseVector solve(const DenseVector& rhs) const;          // (A A^T)^{-1} rhs
  DenseVector apply_gram(const DenseVector& q) const;       // A A^T q
  DenseMatrix cholesky_factor() const;                      // lower triangular L with L L^T = A A^T
  double sigma_min() const { return sigma_min_; }

 private:
  DenseMatrix A_;
  DenseMatrix gram_;
  Eigen::LLT<DenseMatrix> llt_;
  double sigma_min_ = 0.0;
};

DenseVector solve_gram(const GramFactorization& fact, const DenseVector& rhs);

double sigma_min(const DenseMatrix& A);

}  // namespace isa
