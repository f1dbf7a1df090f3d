#pragma once

#include "posdelay/linalg.hpp"
#include "posdelay/vecfield.hpp"

#include <optional>
#include <string>
#include <utility>

namespace posdelay {

/// Which stability condition a certificate satisfies.
enum class CertificateKind {
    ContinuousNonlinear, // f(v) + g(v) < 0
    ContinuousLinear,    // (A + B) v < 0
    ContinuousGeneral,   // (A^M + |B|) v < 0
    DiscreteNonlinear,   // f(v) + g(v) < v
    DiscreteLinear,      // (A + B) v < v
    DiscreteGeneral,     // (|A| + |B|) v < v
};

std::string to_string(CertificateKind kind);

inline bool is_continuous(CertificateKind k) {
    return k == CertificateKind::ContinuousNonlinear || k == CertificateKind::ContinuousLinear ||
           k == CertificateKind::ContinuousGeneral;
}

struct StabilityCertificate {
    PositiveVector v;
    /// Value of the defining inequality at v; entrywise negative.
    Vector slack;
    CertificateKind kind;
    /// Continuous nonlinear certificates rely on f being continuously
    /// differentiable away from the origin, which is assumed, not checked.
    bool smoothness_assumed = false;
};

/// Outcome of verifying a candidate v. The slack is reported even on rejection.
struct VerifyResult {
    std::optional<StabilityCertificate> certificate;
    Vector slack;

    bool accepted() const noexcept { return certificate.has_value(); }
    explicit operator bool() const noexcept { return accepted(); }
};

/// True iff every slack entry is below -kStrictTol * ||v||_inf.
bool strictly_negative(const Vector& slack, const PositiveVector& v);

/// Accepts iff f(v) + g(v) < 0. Throws for degree != 1 or mismatched dimensions.
VerifyResult verify_continuous(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v);

/// Accepts iff f(v) + g(v) < v.
VerifyResult verify_discrete(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v);

/// v = -(A + B)^{-1} 1 when A + B is Hurwitz; std::nullopt otherwise.
std::optional<StabilityCertificate> synthesize_linear_continuous(const MetzlerMatrix& a, const NonnegativeMatrix& b);

/// v = (I - A - B)^{-1} 1 when rho(A + B) < 1; std::nullopt otherwise.
std::optional<StabilityCertificate> synthesize_linear_discrete(const NonnegativeMatrix& a, const NonnegativeMatrix& b);

/// (A^M, |B|): A^M keeps the diagonal of A and takes |a_ij| off it.
std::pair<MetzlerMatrix, NonnegativeMatrix> majorant_continuous(const Matrix& a, const Matrix& b);

/// (|A|, |B|).
std::pair<NonnegativeMatrix, NonnegativeMatrix> majorant_discrete(const Matrix& a, const Matrix& b);

/// Checks (A^M + |B|) v < 0 for arbitrary real A, B.
VerifyResult verify_general_continuous(const Matrix& a, const Matrix& b, const PositiveVector& v);

/// Checks (|A| + |B|) v < v for arbitrary real A, B.
VerifyResult verify_general_discrete(const Matrix& a, const Matrix& b, const PositiveVector& v);

std::optional<StabilityCertificate> synthesize_general_continuous(const Matrix& a, const Matrix& b);
std::optional<StabilityCertificate> synthesize_general_discrete(const Matrix& a, const Matrix& b);

} // namespace posdelay
