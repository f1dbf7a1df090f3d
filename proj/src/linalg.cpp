#include "posdelay/linalg.hpp"

#include "posdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace posdelay {

namespace {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw ValidationError(std::string(what) + ": entries must be finite");
    }
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
    }
}

double inf_norm(const Matrix& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace

PositiveVector::PositiveVector(Vector values) : values_(std::move(values)) {
    if (values_.size() < 1) {
        throw ValidationError("PositiveVector: length must be at least 1");
    }
    if (!values_.allFinite()) {
        throw ValidationError("PositiveVector: entries must be finite");
    }
    const double scale = values_.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || (values_.array() <= kStrictTol * scale).any()) {
        throw ValidationError("PositiveVector: entries must be strictly positive");
    }
}

PositiveVector PositiveVector::normalized() const {
    return PositiveVector(values_ / values_.norm());
}

PositiveVector PositiveVector::scaled(double factor) const {
    return PositiveVector(values_ * factor);
}

PositiveVector PositiveVector::ones(Index n) {
    return PositiveVector(Vector::Ones(n));
}

bool is_metzler(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (i != j && !(m(i, j) >= 0.0)) return false;
    return true;
}

bool is_nonnegative(const Matrix& m) {
    return (m.array() >= 0.0).all();
}

MetzlerMatrix::MetzlerMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "MetzlerMatrix");
    require_finite(entries_, "MetzlerMatrix");
    if (!is_metzler(entries_)) {
        throw ValidationError("MetzlerMatrix: off-diagonal entries must be nonnegative");
    }
}

MetzlerMatrix MetzlerMatrix::shifted(double c) const {
    Matrix m = entries_;
    m.diagonal().array() += c;
    return MetzlerMatrix(std::move(m));
}

NonnegativeMatrix::NonnegativeMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "NonnegativeMatrix");
    require_finite(entries_, "NonnegativeMatrix");
    if (!is_nonnegative(entries_)) {
        throw ValidationError("NonnegativeMatrix: entries must be nonnegative");
    }
}

double weighted_inf_norm(const Vector& x, const PositiveVector& v) {
    if (x.size() != v.size()) {
        throw DimensionError("weighted_inf_norm: dimension mismatch");
    }
    return (x.cwiseAbs().array() / v.values().array()).maxCoeff();
}

std::optional<PositiveVector> hurwitz_certificate(const MetzlerMatrix& m) {
    const Matrix& a = m.entries();
    const Index n = a.rows();
    const Eigen::PartialPivLU<Matrix> lu(a);
    const Vector v = lu.solve(-Vector::Ones(n));
    if (!v.allFinite()) return std::nullopt;

    const double vmax = v.cwiseAbs().maxCoeff();
    if (!(vmax > 0.0) || (v.array() <= kStrictTol * vmax).any()) return std::nullopt;

    // The solve may succeed numerically on a singular matrix; re-check the image.
    const Vector image = a * v;
    const double margin = kStrictTol * std::max(inf_norm(a), 1.0) * vmax;
    if ((image.array() >= -margin).any()) return std::nullopt;

    return PositiveVector(v);
}

double spectral_abscissa(const MetzlerMatrix& m, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("spectral_abscissa: tol must be positive");
    const Matrix& a = m.entries();
    const Index n = a.rows();

    // mu >= max_i m_ii for Metzler matrices; Gershgorin bounds it above.
    double lo = a.diagonal().maxCoeff();
    double hi = lo;
    for (Index i = 0; i < n; ++i) {
        double row = a(i, i);
        for (Index j = 0; j < n; ++j)
            if (j != i) row += a(i, j);
        hi = std::max(hi, row);
    }
    hi += 1.0;

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hurwitz_certificate(m.shifted(-mid))) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double perron_root(const NonnegativeMatrix& n, double tol) {
    return std::max(0.0, spectral_abscissa(n.as_metzler(), tol));
}

bool is_irreducible(const Matrix& m) {
    const Index n = m.rows();
    if (n <= 1) return true;

    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Index> stack{0};
        seen[0] = 1;
        Index count = 1;
        while (!stack.empty()) {
            const Index i = stack.back();
            stack.pop_back();
            for (Index j = 0; j < n; ++j) {
                const double e = transpose ? m(j, i) : m(i, j);
                if (j != i && e != 0.0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

PositiveVector perron_vector(const MetzlerMatrix& m, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("perron_vector: tol must be positive");
    const Matrix& a = m.entries();
    if (!is_irreducible(a)) {
        throw ReducibleMatrixError("perron_vector: matrix is reducible");
    }
    const Index n = a.rows();
    const double scale = std::max(inf_norm(a), 1.0);
    const double target = tol * scale;

    const double shift = 1.0 + a.diagonal().cwiseAbs().maxCoeff();
    Matrix shifted = a;
    shifted.diagonal().array() += shift;

    auto residual = [&](const Vector& v, double lambda) {
        return (a * v - lambda * v).cwiseAbs().maxCoeff();
    };

    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = v.dot(a * v);
    bool converged = residual(v, lambda) <= 0.5 * target;

    constexpr int kPowerIterations = 20000;
    for (int it = 0; it < kPowerIterations && !converged; ++it) {
        Vector w = shifted * v;
        v = w / w.norm();
        lambda = v.dot(a * v);
        converged = residual(v, lambda) <= 0.5 * target;
    }

    if (!converged) {
        // Slow spectral gap: finish with inverse iteration just above mu.
        const double mu = spectral_abscissa(m, 0.1 * tol);
        Matrix near = a;
        near.diagonal().array() -= mu + std::max(tol, 1e-10 * scale);
        const Eigen::PartialPivLU<Matrix> lu(near);
        for (int it = 0; it < 100 && !converged; ++it) {
            Vector w = lu.solve(v);
            if (!w.allFinite()) break;
            v = w / w.norm();
            lambda = v.dot(a * v);
            converged = residual(v, lambda) <= target;
        }
    }

    if (v.sum() < 0.0) v = -v;
    if (!converged) {
        throw ConvergenceError("perron_vector: residual target not reached");
    }
    // Irreducible Metzler matrices have a strictly positive Perron vector.
    v = v.cwiseMax(0.0);
    return PositiveVector(v / v.norm());
}

MetzlerMatrix perturb_to_irreducible(const MetzlerMatrix& m, double epsilon) {
    Matrix a = m.entries();
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            if (i != j && a(i, j) == 0.0) a(i, j) = epsilon;
    return MetzlerMatrix(std::move(a));
}

} // namespace posdelay
