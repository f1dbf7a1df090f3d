#include "posdelay/certify.hpp"

#include "posdelay/error.hpp"

namespace posdelay {

namespace {

void require_degree_one(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v) {
    if (f.degree() != 1.0 || g.degree() != 1.0) {
        throw PreconditionError("certification requires fields homogeneous of degree one");
    }
    if (f.dimension() != g.dimension() || f.dimension() != v.size()) {
        throw DimensionError("certification: f, g and v must share one dimension");
    }
}

void require_same_square(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() || a.rows() == 0) {
        throw DimensionError("A and B must be non-empty square matrices of equal size");
    }
}

VerifyResult finish(Vector slack, const PositiveVector& v, CertificateKind kind, bool smoothness) {
    VerifyResult out;
    out.slack = slack;
    if (slack.allFinite() && strictly_negative(slack, v)) {
        out.certificate = StabilityCertificate{v, std::move(slack), kind, smoothness};
    }
    return out;
}

} // namespace

std::string to_string(CertificateKind kind) {
    switch (kind) {
    case CertificateKind::ContinuousNonlinear: return "cont-nonlinear";
    case CertificateKind::ContinuousLinear: return "cont-linear";
    case CertificateKind::ContinuousGeneral: return "cont-general";
    case CertificateKind::DiscreteNonlinear: return "disc-nonlinear";
    case CertificateKind::DiscreteLinear: return "disc-linear";
    case CertificateKind::DiscreteGeneral: return "disc-general";
    }
    return "unknown";
}

bool strictly_negative(const Vector& slack, const PositiveVector& v) {
    const double margin = kStrictTol * v.values().maxCoeff();
    return (slack.array() < -margin).all();
}

VerifyResult verify_continuous(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v) {
    require_degree_one(f, g, v);
    const bool linear = f.is_linear() && g.is_linear();
    return finish(f.evaluate(v.values()) + g.evaluate(v.values()), v,
                  linear ? CertificateKind::ContinuousLinear : CertificateKind::ContinuousNonlinear, !linear);
}

VerifyResult verify_discrete(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v) {
    require_degree_one(f, g, v);
    const bool linear = f.is_linear() && g.is_linear();
    return finish(f.evaluate(v.values()) + g.evaluate(v.values()) - v.values(), v,
                  linear ? CertificateKind::DiscreteLinear : CertificateKind::DiscreteNonlinear, false);
}

std::optional<StabilityCertificate> synthesize_linear_continuous(const MetzlerMatrix& a, const NonnegativeMatrix& b) {
    require_same_square(a.entries(), b.entries());
    const MetzlerMatrix sum(a.entries() + b.entries());
    auto v = hurwitz_certificate(sum);
    if (!v) return std::nullopt;
    Vector slack = sum.entries() * v->values();
    return StabilityCertificate{*v, std::move(slack), CertificateKind::ContinuousLinear, false};
}

std::optional<StabilityCertificate> synthesize_linear_discrete(const NonnegativeMatrix& a, const NonnegativeMatrix& b) {
    require_same_square(a.entries(), b.entries());
    const Matrix sum = a.entries() + b.entries();
    // (A + B - I) v = -1  <=>  (I - A - B) v = 1
    auto v = hurwitz_certificate(MetzlerMatrix(sum).shifted(-1.0));
    if (!v) return std::nullopt;
    Vector slack = sum * v->values() - v->values();
    return StabilityCertificate{*v, std::move(slack), CertificateKind::DiscreteLinear, false};
}

std::pair<MetzlerMatrix, NonnegativeMatrix> majorant_continuous(const Matrix& a, const Matrix& b) {
    require_same_square(a, b);
    Matrix am = a.cwiseAbs();
    am.diagonal() = a.diagonal();
    return {MetzlerMatrix(std::move(am)), NonnegativeMatrix(b.cwiseAbs())};
}

std::pair<NonnegativeMatrix, NonnegativeMatrix> majorant_discrete(const Matrix& a, const Matrix& b) {
    require_same_square(a, b);
    return {NonnegativeMatrix(a.cwiseAbs()), NonnegativeMatrix(b.cwiseAbs())};
}

VerifyResult verify_general_continuous(const Matrix& a, const Matrix& b, const PositiveVector& v) {
    const auto [am, bm] = majorant_continuous(a, b);
    if (v.size() != am.size()) throw DimensionError("verify_general_continuous: dimension mismatch");
    return finish((am.entries() + bm.entries()) * v.values(), v, CertificateKind::ContinuousGeneral, false);
}

VerifyResult verify_general_discrete(const Matrix& a, const Matrix& b, const PositiveVector& v) {
    const auto [am, bm] = majorant_discrete(a, b);
    if (v.size() != am.size()) throw DimensionError("verify_general_discrete: dimension mismatch");
    return finish((am.entries() + bm.entries()) * v.values() - v.values(), v, CertificateKind::DiscreteGeneral,
                  false);
}

std::optional<StabilityCertificate> synthesize_general_continuous(const Matrix& a, const Matrix& b) {
    const auto [am, bm] = majorant_continuous(a, b);
    auto cert = synthesize_linear_continuous(am, bm);
    if (cert) cert->kind = CertificateKind::ContinuousGeneral;
    return cert;
}

std::optional<StabilityCertificate> synthesize_general_discrete(const Matrix& a, const Matrix& b) {
    const auto [am, bm] = majorant_discrete(a, b);
    auto cert = synthesize_linear_discrete(am, bm);
    if (cert) cert->kind = CertificateKind::DiscreteGeneral;
    return cert;
}

} // namespace posdelay
