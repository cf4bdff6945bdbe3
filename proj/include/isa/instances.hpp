#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isa/types.hpp"

namespace isa {

// Equality-constrained l1 instance, columns of A unit-norm. A planted point
// with a sub-unit exact-recovery value is the unique minimizer.
struct BpInstance {
  DenseMatrix A;
  DenseVector b;
  std::optional<DenseVector> x_star;
  double sigma_min = 0.0;
  std::optional<double> erc_value;
  bool erc_certified = false;

  std::vector<int> support() const;  // exact nonzeros of the planted point
  double f_star() const;             // l1 norm of the planted point
};

// Sylvester recursion, entries +-1, H^T H = mI
DenseMatrix hadamard(int m);

// [Band | BlockDiag+row | Hadamard | I], m x 4m, columns normalized.
// Band is tridiagonal with Gaussian nonzeros; BlockDiag has four m/4 blocks
// with its last row replaced by a dense Gaussian row.
DenseMatrix build_concat_dictionary(int m, std::uint64_t seed);

// max over off-support columns a_j of |pinv(A_S) a_j|_1; < 1 certifies that
// the planted support recovers uniquely
double erc_check(const DenseMatrix& A, const std::vector<int>& support);

// Draws supports until the recovery condition certifies (up to 50 tries),
// keeps the best attempt otherwise; magnitudes standard Gaussian.
BpInstance plant_sparse_solution(const DenseMatrix& A, int support_size, std::uint64_t seed);

BpInstance generate_instance(int m, int support_size, std::uint64_t seed);

// A^T b, generically infeasible
DenseVector default_start(const DenseMatrix& A, const DenseVector& b);

// plain text container: "isa-bp v1 m n", row-major A, b, optional planted point
void save_instance(const BpInstance& inst, const std::string& path);
BpInstance load_instance(const std::string& path);

}  // namespace isa
