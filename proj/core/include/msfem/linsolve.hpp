// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "msfem/errors.hpp"
#include "msfem/fespace.hpp"

#include <Eigen/SparseCore>

#include <memory>

namespace msfem {

using SparseMatrixXc = Eigen::SparseMatrix<Complex>;
using SparseMatrixXd = Eigen::SparseMatrix<double>;

// Sparse LU factorization of a complex (typically complex symmetric) matrix.
// Factor once, solve for many right-hand sides. Every solve is checked
// against ||Ax - b||_inf <= 1e-10 (||A||_inf ||x||_inf + ||b||_inf); a
// violation or a factorization breakdown throws SingularSystemError.
class SparseFactor {
 public:
  explicit SparseFactor(const SparseMatrixXc& a);
  ~SparseFactor();
  SparseFactor(SparseFactor&&) noexcept;
  SparseFactor& operator=(SparseFactor&&) noexcept;

  VectorXc solve(const VectorXc& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Same contract for a real matrix: one real factorization serves complex
// right-hand sides through separate real and imaginary solves.
class RealSparseFactor {
 public:
  explicit RealSparseFactor(const SparseMatrixXd& a);
  ~RealSparseFactor();
  RealSparseFactor(RealSparseFactor&&) noexcept;
  RealSparseFactor& operator=(RealSparseFactor&&) noexcept;

  VectorXc solve(const VectorXc& b) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrappers.
VectorXc solve_sparse(const SparseMatrixXc& a, const VectorXc& b);
VectorXc solve_sparse(const SparseMatrixXd& a, const VectorXc& b);

} // namespace msfem
