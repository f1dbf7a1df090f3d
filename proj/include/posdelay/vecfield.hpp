#pragma once

#include "posdelay/expr.hpp"
#include "posdelay/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace posdelay {

enum class FieldClass { Cooperative, OrderPreserving, Unclassified };

std::string to_string(FieldClass c);

/**
 * An evaluable vector field R^n -> R^n, given either by component
 * expressions or by a matrix (linear form x -> M x).
 *
 * Expression fields that are undefined at the origin as written (e.g.
 * x1*x2/sqrt(x1^2+x2^2)) evaluate to 0 there, by continuity. Construction
 * rejects fields whose value at the origin is defined and nonzero.
 */
class HomogeneousField {
public:
    static HomogeneousField from_expressions(FieldExpr body, double degree = 1.0,
                                             FieldClass declared = FieldClass::Unclassified);

    /// Declared class defaults to OrderPreserving for nonnegative matrices,
    /// Cooperative for Metzler ones, Unclassified otherwise.
    static HomogeneousField linear(Matrix m, std::optional<FieldClass> declared = std::nullopt);

    static HomogeneousField zero(Index n);

    Index dimension() const noexcept { return dimension_; }
    double degree() const noexcept { return degree_; }
    FieldClass declared_class() const noexcept { return declared_; }

    bool is_linear() const noexcept { return std::holds_alternative<Matrix>(body_); }
    /// Null for expression fields.
    const Matrix* matrix() const noexcept { return std::get_if<Matrix>(&body_); }
    const FieldExpr* expression() const noexcept { return std::get_if<FieldExpr>(&body_); }

    Vector evaluate(const Vector& x) const;

    /// One line per component, suitable for hashing and display.
    std::string describe() const;

private:
    HomogeneousField(std::variant<FieldExpr, Matrix> body, Index n, double degree, FieldClass declared);

    Vector evaluate_raw(const Vector& x) const;

    std::variant<FieldExpr, Matrix> body_;
    Index dimension_;
    double degree_;
    FieldClass declared_;
};

/// Outcome of a randomized class probe. Probes are evidence, not proofs.
struct ProbeVerdict {
    struct Counterexample {
        Vector x;
        Vector y;            // second point (order-preserving probe), empty otherwise
        double lambda = 0.0; // scaling factor (homogeneity probe)
        std::string detail;
    };

    bool pass = true;
    std::optional<Counterexample> counterexample;

    explicit operator bool() const noexcept { return pass; }
};

/// ||f(lx) - l^alpha f(x)||_inf <= 1e-9 (1 + ||f(x)||_inf) for l in {0.5, 2, 3.7}.
ProbeVerdict probe_homogeneity(const HomogeneousField& field, double alpha, int trials, std::uint64_t seed);

/// Off-diagonal central-difference Jacobian entries >= -1e-6 at random x > 0.
ProbeVerdict probe_cooperative(const HomogeneousField& field, int trials, std::uint64_t seed);

/// g(x) >= g(y) - 1e-9 for random pairs x >= y >= 0.
ProbeVerdict probe_order_preserving(const HomogeneousField& field, int trials, std::uint64_t seed);

} // namespace posdelay
