#include "isa/instances.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "isa/linalg.hpp"
#include "isa/rng.hpp"
#include "isa/textio.hpp"

namespace isa {

namespace {

bool power_of_two(int m) { return m >= 1 && (m & (m - 1)) == 0; }

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(std::move(tok));
  return out;
}

}  // namespace

std::vector<int> BpInstance::support() const {
  std::vector<int> out;
  if (!x_star) return out;
  for (Eigen::Index i = 0; i < x_star->size(); ++i) {
    if ((*x_star)(i) != 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

double BpInstance::f_star() const {
  if (!x_star) throw UsageError("instance has no planted point");
  return x_star->lpNorm<1>();
}

DenseMatrix hadamard(int m) {
  if (!power_of_two(m)) throw UsageError("hadamard: order must be a power of 2");
  DenseMatrix h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < m) {
    Eigen::Index r = h.rows();
    DenseMatrix next(2 * r, 2 * r);
    next.topLeftCorner(r, r) = h;
    next.topRightCorner(r, r) = h;
    next.bottomLeftCorner(r, r) = h;
    next.bottomRightCorner(r, r) = -h;
    h = std::move(next);
  }
  return h;
}

DenseMatrix build_concat_dictionary(int m, std::uint64_t seed) {
  if (!power_of_two(m) || m < 4) {
    throw UsageError("build_concat_dictionary: rows must be a power of 2, at least 4");
  }
  Rng rng(seed);

  DenseMatrix band = DenseMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = std::max(0, i - 1); j <= std::min(m - 1, i + 1); ++j) {
      band(i, j) = rng.gaussian();
    }
  }

  DenseMatrix block = DenseMatrix::Zero(m, m);
  const int bs = m / 4;
  for (int blk = 0; blk < 4; ++blk) {
    int base = blk * bs;
    for (int i = 0; i < bs; ++i) {
      for (int j = 0; j < bs; ++j) {
        block(base + i, base + j) = rng.gaussian();
      }
    }
  }
  for (int j = 0; j < m; ++j) block(m - 1, j) = rng.gaussian();

  DenseMatrix A(m, 4 * m);
  A.block(0, 0, m, m) = band;
  A.block(0, m, m, m) = block;
  A.block(0, 2 * m, m, m) = hadamard(m);
  A.block(0, 3 * m, m, m) = DenseMatrix::Identity(m, m);

  for (int j = 0; j < 4 * m; ++j) {
    double norm = A.col(j).norm();
    if (!(norm > 0.0)) throw DegenerateInstanceError("dictionary produced a zero column");
    A.col(j) /= norm;
  }
  return A;
}

double erc_check(const DenseMatrix& A, const std::vector<int>& support) {
  const Eigen::Index n = A.cols();
  for (int j : support) {
    if (j < 0 || j >= n) throw UsageError("erc_check: support index out of range");
  }
  const int s = static_cast<int>(support.size());
  if (s == 0) return 0.0;
  if (s > A.rows()) throw DegenerateInstanceError("erc_check: support larger than row count");

  DenseMatrix As(A.rows(), s);
  for (int i = 0; i < s; ++i) As.col(i) = A.col(support[i]);

  DenseMatrix gram = As.transpose() * As;
  Eigen::LLT<DenseMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw DegenerateInstanceError("erc_check: support columns are dependent");
  }
  DenseVector diag = DenseMatrix(llt.matrixL()).diagonal();
  if (diag.minCoeff() <= 1e-7 * diag.maxCoeff()) {
    throw DegenerateInstanceError("erc_check: support columns are numerically dependent");
  }

  std::vector<bool> on_support(n, false);
  for (int j : support) on_support[j] = true;

  double worst = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (on_support[j]) continue;
    DenseVector w = llt.solve(As.transpose() * A.col(j));
    worst = std::max(worst, w.lpNorm<1>());
  }
  return worst;
}

BpInstance plant_sparse_solution(const DenseMatrix& A, int support_size, std::uint64_t seed) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (support_size < 0 || support_size > m) {
    throw UsageError("plant_sparse_solution: support size must lie in [0, m]");
  }

  BpInstance inst;
  inst.A = A;
  inst.sigma_min = GramFactorization(A).sigma_min();

  if (support_size == 0) {
    inst.x_star = DenseVector::Zero(n);
    inst.b = DenseVector::Zero(m);
    inst.erc_value = 0.0;
    inst.erc_certified = true;
    return inst;
  }

  Rng rng(seed + 1000ull);
  double best_erc = std::numeric_limits<double>::infinity();
  std::vector<int> best_support;
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<int> candidate = rng.sample_indices(static_cast<int>(n), support_size);
    double value;
    try {
      value = erc_check(A, candidate);
    } catch (const DegenerateInstanceError&) {
      continue;
    }
    if (value < best_erc) {
      best_erc = value;
      best_support = std::move(candidate);
    }
    if (best_erc < 1.0) break;
  }
  if (best_support.empty()) {
    throw DegenerateInstanceError("plant_sparse_solution: no independent support found");
  }

  DenseVector x = DenseVector::Zero(n);
  for (int idx : best_support) {
    double g;
    do {
      g = rng.gaussian();
    } while (std::abs(g) < 1e-8);
    x(idx) = g;
  }
  inst.x_star = x;
  inst.b = A * x;
  ensure_finite(inst.b, "planted right-hand side");
  inst.erc_value = best_erc;
  inst.erc_certified = best_erc < 1.0;
  return inst;
}

BpInstance generate_instance(int m, int support_size, std::uint64_t seed) {
  return plant_sparse_solution(build_concat_dictionary(m, seed), support_size, seed);
}

DenseVector default_start(const DenseMatrix& A, const DenseVector& b) {
  if (b.size() != A.rows()) throw UsageError("default_start: dimension mismatch");
  return A.transpose() * b;
}

void save_instance(const BpInstance& inst, const std::string& path) {
  const Eigen::Index m = inst.A.rows();
  const Eigen::Index n = inst.A.cols();
  if (m == 0 || n == 0) throw UsageError("save_instance: empty matrix");
  if (inst.b.size() != m) throw UsageError("save_instance: right-hand side size mismatch");
  if (inst.x_star && inst.x_star->size() != n) {
    throw UsageError("save_instance: planted point size mismatch");
  }

  std::ofstream out(path);
  if (!out) throw UsageError("cannot open instance file for writing: " + path);
  out << "isa-bp v1 " << m << ' ' << n << '\n';
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j) out << ' ';
      out << format_double(inst.A(i, j));
    }
    out << '\n';
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j) out << ' ';
    out << format_double(inst.b(j));
  }
  out << '\n';
  if (inst.x_star) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j) out << ' ';
      out << format_double((*inst.x_star)(j));
    }
    out << '\n';
  }
  if (!out) throw UsageError("write failed: " + path);
}

BpInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open instance file: " + path);

  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) lines.push_back(raw);
  while (!lines.empty() && split_tokens(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw UsageError("instance file is empty: " + path);

  auto header = split_tokens(lines[0]);
  if (header.size() != 4 || header[0] != "isa-bp" || header[1] != "v1") {
    throw UsageError("instance file has an unrecognized header: " + path);
  }
  long long m_l = parse_int(header[2]);
  long long n_l = parse_int(header[3]);
  if (m_l < 1 || n_l < 1 || m_l > 100000 || n_l > 1000000) {
    throw UsageError("instance header dimensions out of range");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(m_l);
  const Eigen::Index n = static_cast<Eigen::Index>(n_l);

  const size_t without_star = 1 + static_cast<size_t>(m) + 1;
  const size_t with_star = without_star + 1;
  if (lines.size() != without_star && lines.size() != with_star) {
    throw UsageError("instance file has the wrong number of lines");
  }

  auto parse_row = [&](const std::string& line, Eigen::Index want) {
    auto toks = split_tokens(line);
    if (static_cast<Eigen::Index>(toks.size()) != want) {
      throw UsageError("instance row has the wrong entry count");
    }
    DenseVector v(want);
    for (Eigen::Index j = 0; j < want; ++j) v(j) = parse_double(toks[j]);
    return v;
  };

  BpInstance inst;
  inst.A.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) inst.A.row(i) = parse_row(lines[1 + i], n).transpose();
  inst.b = parse_row(lines[1 + m], m);
  if (lines.size() == with_star) inst.x_star = parse_row(lines[2 + m], n);

  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::abs(inst.A.col(j).norm() - 1.0) > 1e-12) {
      throw UsageError("instance columns must be unit norm");
    }
  }
  if (inst.x_star) {
    double infeas = (inst.A * *inst.x_star - inst.b).lpNorm<Eigen::Infinity>();
    if (infeas > 1e-12) throw UsageError("planted point does not satisfy the constraints");
  }

  inst.sigma_min = GramFactorization(inst.A).sigma_min();
  if (inst.x_star) {
    try {
      inst.erc_value = erc_check(inst.A, inst.support());
      inst.erc_certified = *inst.erc_value < 1.0;
    } catch (const DegenerateInstanceError&) {
      inst.erc_value.reset();
      inst.erc_certified = false;
    }
  }
  return inst;
}

}  // namespace isa
