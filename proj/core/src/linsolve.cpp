// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#include "msfem/linsolve.hpp"

#include <Eigen/SparseLU>

#include <cctype>
#include <cmath>
#include <string>

namespace msfem {

namespace {

// Eigen reports singular factorizations through a free-form message that
// ends with the offending column; recover it, -1 when absent.
long pivot_from_message(const std::string& msg) {
  long end = static_cast<long>(msg.size()) - 1;
  while (end >= 0 && std::isspace(static_cast<unsigned char>(msg[end]))) --end;
  long begin = end;
  while (begin >= 0 && std::isdigit(static_cast<unsigned char>(msg[begin])))
    --begin;
  if (begin == end) return -1;
  return std::stol(msg.substr(begin + 1, end - begin));
}

template <typename Scalar>
void check_structure(const Eigen::SparseMatrix<Scalar>& a) {
  if (a.rows() != a.cols())
    throw SingularSystemError("matrix is not square", -1);
  // Structurally empty rows or columns never reach a usable pivot; report
  // them up front with the exact index.
  Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(a.rows());
  Eigen::VectorXd col_abs = Eigen::VectorXd::Zero(a.cols());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, k); it;
         ++it) {
      const double v = std::abs(it.value());
      row_abs[it.row()] += v;
      col_abs[it.col()] += v;
    }
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (row_abs[i] == 0.0)
      throw SingularSystemError(
          "zero row " + std::to_string(i) + " in sparse system", i);
    if (col_abs[i] == 0.0)
      throw SingularSystemError(
          "zero column " + std::to_string(i) + " in sparse system", i);
  }
}

template <typename Scalar>
double inf_norm(const Eigen::SparseMatrix<Scalar>& a) {
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, k); it;
         ++it)
      row_sum[it.row()] += std::abs(it.value());
  }
  return a.rows() ? row_sum.maxCoeff() : 0.0;
}

template <typename Scalar>
struct FactorImpl {
  Eigen::SparseMatrix<Scalar> a;
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>> lu;
  double a_norm = 0.0;

  explicit FactorImpl(const Eigen::SparseMatrix<Scalar>& m) : a(m) {
    a.makeCompressed();
    check_structure(a);
    a_norm = inf_norm(a);
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
      const std::string msg = lu.lastErrorMessage();
      throw SingularSystemError("sparse LU factorization failed: " + msg,
                                pivot_from_message(msg));
    }
  }

  VectorXc solve_complex(const VectorXc& b) const {
    if (b.size() != a.rows())
      throw std::invalid_argument("solve: right-hand side size mismatch");
    VectorXc x;
    if constexpr (std::is_same_v<Scalar, Complex>) {
      x = lu.solve(b);
    } else {
      x = lu.solve(b.real().eval()).template cast<Complex>();
      x += Complex(0, 1) * lu.solve(b.imag().eval()).template cast<Complex>();
    }
    const double resid = (a.template cast<Complex>() * x - b)
                             .template lpNorm<Eigen::Infinity>();
    const double bound =
        1e-10 * (a_norm * x.template lpNorm<Eigen::Infinity>() +
                 b.template lpNorm<Eigen::Infinity>());
    if (!(resid <= bound))
      throw SingularSystemError(
          "solve residual " + std::to_string(resid) +
              " exceeds stability bound " + std::to_string(bound),
          -1);
    return x;
  }
};

} // namespace

struct SparseFactor::Impl : FactorImpl<Complex> {
  using FactorImpl<Complex>::FactorImpl;
};

SparseFactor::SparseFactor(const SparseMatrixXc& a)
    : impl_(std::make_unique<Impl>(a)) {}
SparseFactor::~SparseFactor() = default;
SparseFactor::SparseFactor(SparseFactor&&) noexcept = default;
SparseFactor& SparseFactor::operator=(SparseFactor&&) noexcept = default;

VectorXc SparseFactor::solve(const VectorXc& b) const {
  return impl_->solve_complex(b);
}

struct RealSparseFactor::Impl : FactorImpl<double> {
  using FactorImpl<double>::FactorImpl;
};

RealSparseFactor::RealSparseFactor(const SparseMatrixXd& a)
    : impl_(std::make_unique<Impl>(a)) {}
RealSparseFactor::~RealSparseFactor() = default;
RealSparseFactor::RealSparseFactor(RealSparseFactor&&) noexcept = default;
RealSparseFactor& RealSparseFactor::operator=(RealSparseFactor&&) noexcept =
    default;

VectorXc RealSparseFactor::solve(const VectorXc& b) const {
  return impl_->solve_complex(b);
}

Eigen::VectorXd RealSparseFactor::solve(const Eigen::VectorXd& b) const {
  return impl_->solve_complex(b.cast<Complex>()).real();
}

VectorXc solve_sparse(const SparseMatrixXc& a, const VectorXc& b) {
  return SparseFactor(a).solve(b);
}

VectorXc solve_sparse(const SparseMatrixXd& a, const VectorXc& b) {
  return RealSparseFactor(a).solve(b);
}

} // namespace msfem
