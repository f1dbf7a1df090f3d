#pragma once

/**
 * @file linalg.hpp
 * @brief Validated carriers for positive-systems linear algebra and the
 *        Perron-Frobenius spectral primitives built on them.
 *
 * All spectral quantities are computed without a general eigensolver. The
 * central primitive is the M-matrix test: a Metzler matrix M is Hurwitz iff
 * the solution of M v = -1 is entrywise positive. Spectral abscissa and
 * Perron root follow by bisection on the shift s in M - sI.
 */

#include <Eigen/Dense>

#include <optional>

namespace posdelay {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Relative margin used whenever a floating-point strict inequality is decided.
inline constexpr double kStrictTol = 1e-12;

/// Default absolute tolerance on bisected scalars.
inline constexpr double kDefaultTol = 1e-9;

/// Weight vector with strictly positive entries (v_i > kStrictTol * max_j v_j).
class PositiveVector {
public:
    explicit PositiveVector(Vector values);

    const Vector& values() const noexcept { return values_; }
    Index size() const noexcept { return values_.size(); }
    double operator[](Index i) const { return values_[i]; }

    /// Same direction, unit Euclidean norm.
    PositiveVector normalized() const;
    PositiveVector scaled(double factor) const;

    static PositiveVector ones(Index n);

private:
    Vector values_;
};

/// Square matrix with nonnegative off-diagonal entries.
class MetzlerMatrix {
public:
    explicit MetzlerMatrix(Matrix entries);

    const Matrix& entries() const noexcept { return entries_; }
    Index size() const noexcept { return entries_.rows(); }

    /// M + c I, which is again Metzler.
    MetzlerMatrix shifted(double c) const;

private:
    Matrix entries_;
};

/// Square matrix with all entries nonnegative.
class NonnegativeMatrix {
public:
    explicit NonnegativeMatrix(Matrix entries);

    const Matrix& entries() const noexcept { return entries_; }
    Index size() const noexcept { return entries_.rows(); }

    MetzlerMatrix as_metzler() const { return MetzlerMatrix(entries_); }

private:
    Matrix entries_;
};

bool is_metzler(const Matrix& m);
bool is_nonnegative(const Matrix& m);

/// max_i |x_i| / v_i
double weighted_inf_norm(const Vector& x, const PositiveVector& v);

/**
 * Returns v > 0 with M v < 0 when M is Hurwitz, std::nullopt otherwise.
 *
 * Solves M v = -1 with partial pivoting and accepts iff every v_i is
 * strictly positive and the recomputed M v is strictly negative, both with
 * the kStrictTol margin. A singular or ill-posed solve yields std::nullopt.
 */
std::optional<PositiveVector> hurwitz_certificate(const MetzlerMatrix& m);

/// Largest real part of the eigenvalues of m, within tol.
double spectral_abscissa(const MetzlerMatrix& m, double tol = kDefaultTol);

/// Spectral radius of a nonnegative matrix, within tol.
double perron_root(const NonnegativeMatrix& n, double tol = kDefaultTol);

/// True iff the digraph of nonzero off-diagonal entries is strongly connected.
bool is_irreducible(const Matrix& m);

/**
 * Unit 2-norm positive eigenvector for the spectral abscissa of an
 * irreducible Metzler matrix, by power iteration on M + sI with
 * s = 1 + max_i |m_ii|. Throws ReducibleMatrixError on reducible input and
 * ConvergenceError if the residual target is not reached.
 */
PositiveVector perron_vector(const MetzlerMatrix& m, double tol = kDefaultTol);

/// Replaces every zero off-diagonal entry by epsilon. Changes the spectrum; opt-in only.
MetzlerMatrix perturb_to_irreducible(const MetzlerMatrix& m, double epsilon = 1e-12);

} // namespace posdelay
