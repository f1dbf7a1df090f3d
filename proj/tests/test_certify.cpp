#include "oracles.hpp"

#include "posdelay/certify.hpp"
#include "posdelay/error.hpp"

#include <doctest.h>

using namespace posdelay;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

const Matrix kA2 = m2(-6, 2, 1, -3);
const Matrix kB2 = m2(3, 0, 0, 0.5);
const Matrix kA3 = m2(0.4, 0.1, 0.2, 0.6);
const Matrix kB3 = m2(0.3, 0, 0, 0.1);

HomogeneousField lin(const Matrix& m) {
    return HomogeneousField::linear(m);
}

} // namespace

TEST_CASE("verify_continuous") {
    const FieldExpr f = parse_field({"-3*x1 + 6*x2 - 3*sqrt(x1^2 + x2^2)", "2*x1 - 2*x2 - sqrt(x1^2 + x2^2)"}, 2);
    const FieldExpr g = parse_field({"x1*x2/sqrt(x1^2 + x2^2)", "x1*x2/sqrt(2*x1^2 + 3*x2^2)"}, 2);
    const auto ff = HomogeneousField::from_expressions(f, 1.0, FieldClass::Cooperative);
    const auto gg = HomogeneousField::from_expressions(g, 1.0, FieldClass::OrderPreserving);

    const VerifyResult r = verify_continuous(ff, gg, PositiveVector::ones(2));
    REQUIRE(r.accepted());
    CHECK(r.certificate->kind == CertificateKind::ContinuousNonlinear);
    CHECK(r.certificate->smoothness_assumed);
    CHECK(r.slack[0] == doctest::Approx(3 - 3 * std::sqrt(2.0) + 1 / std::sqrt(2.0)).epsilon(1e-13));
    CHECK(r.slack[1] == doctest::Approx(-std::sqrt(2.0) + 1 / std::sqrt(5.0)).epsilon(1e-13));
    CHECK(std::abs(r.slack[0] + 0.5355) < 1e-4);
    CHECK(std::abs(r.slack[1] + 0.9670) < 1e-4);

    const VerifyResult lr = verify_continuous(lin(kA2), lin(kB2), PositiveVector(v2(0.7645, 0.6446)));
    REQUIRE(lr.accepted());
    CHECK(lr.certificate->kind == CertificateKind::ContinuousLinear);
    CHECK(((kA2 + kB2) * lr.certificate->v.values()).maxCoeff() < 0.0);

    const VerifyResult zero = verify_continuous(HomogeneousField::zero(2), HomogeneousField::zero(2),
                                                PositiveVector(v2(1, 3)));
    CHECK_FALSE(zero.accepted());
    CHECK(zero.slack.isZero(0));

    CHECK_THROWS_AS(verify_continuous(lin(kA2), lin(kB2), PositiveVector::ones(3)), DimensionError);
    const auto quadratic = HomogeneousField::from_expressions(parse_field({"-x1^2", "-x2^2"}, 2), 2.0);
    CHECK_THROWS_AS(verify_continuous(quadratic, lin(kB2), PositiveVector::ones(2)), PreconditionError);
}

TEST_CASE("verify_discrete") {
    CHECK(verify_discrete(lin(kA3), lin(kB3), PositiveVector(v2(0.6884, 0.7254))).accepted());
    const VerifyResult ones = verify_discrete(lin(kA3), lin(kB3), PositiveVector::ones(2));
    REQUIRE(ones.accepted());
    CHECK(ones.certificate->kind == CertificateKind::DiscreteLinear);
    CHECK(ones.slack[0] == doctest::Approx(0.8 - 1.0));
    CHECK(ones.slack[1] == doctest::Approx(0.9 - 1.0));
    CHECK_FALSE(verify_discrete(lin(Matrix::Identity(2, 2)), HomogeneousField::zero(2), PositiveVector(v2(2, 5)))
                    .accepted());
    CHECK_FALSE(verify_discrete(lin(0.5 * Matrix::Identity(2, 2)), lin(0.5 * Matrix::Identity(2, 2)),
                                PositiveVector::ones(2))
                    .accepted());
}

TEST_CASE("linear synthesis") {
    SUBCASE("continuous") {
        const auto c = synthesize_linear_continuous(MetzlerMatrix(kA2), NonnegativeMatrix(kB2));
        REQUIRE(c);
        CHECK(((kA2 + kB2) * c->v.values() + Vector::Ones(2)).norm() < 1e-12);
        CHECK_FALSE(synthesize_linear_continuous(MetzlerMatrix(Matrix::Ones(1, 1)), NonnegativeMatrix(Matrix::Zero(1, 1))));
        const auto id = synthesize_linear_continuous(MetzlerMatrix(-2 * Matrix::Identity(3, 3)),
                                                     NonnegativeMatrix(Matrix::Identity(3, 3)));
        REQUIRE(id);
        CHECK(id->v.values().isApprox(Vector::Ones(3)));
    }
    SUBCASE("discrete") {
        const auto c = synthesize_linear_discrete(NonnegativeMatrix(kA3), NonnegativeMatrix(kB3));
        REQUIRE(c);
        const Vector v = c->v.values();
        CHECK(((kA3 + kB3) * v - (v - Vector::Ones(2))).norm() < 1e-12);
        CHECK_FALSE(synthesize_linear_discrete(NonnegativeMatrix(Matrix::Identity(2, 2)),
                                               NonnegativeMatrix(Matrix::Zero(2, 2))));
        const auto zero = synthesize_linear_discrete(NonnegativeMatrix(Matrix::Zero(2, 2)),
                                                     NonnegativeMatrix(Matrix::Zero(2, 2)));
        REQUIRE(zero);
        CHECK(zero->v.values().isApprox(Vector::Ones(2)));
    }
    SUBCASE("synthesis agrees with the spectral oracle") {
        std::mt19937_64 rng(31);
        std::uniform_int_distribution<int> dim(2, 8);
        std::uniform_real_distribution<double> margin(-0.5, 0.5);
        for (int trial = 0; trial < 100; ++trial) {
            const Index n = dim(rng);
            const double m = margin(rng);
            if (std::abs(m) < 1e-3) continue;
            const auto [a, b] = oracle::stable_continuous_pair(rng, n, m);
            const auto c = synthesize_linear_continuous(MetzlerMatrix(a), NonnegativeMatrix(b));
            CHECK(c.has_value() == (oracle::spectral_abscissa(a + b) < 0));
            if (c) {
                // Independent re-evaluation of the defining inequality.
                CHECK(((a + b) * c->v.values()).maxCoeff() < 0.0);
                for (double s : {0.5, 2.0}) {
                    CHECK(verify_continuous(lin(a), lin(b), c->v.scaled(s)).accepted());
                }
            }
            const auto [ad, bd] = oracle::stable_discrete_pair(rng, n, 1.0 + m);
            const auto cd = synthesize_linear_discrete(NonnegativeMatrix(ad), NonnegativeMatrix(bd));
            CHECK(cd.has_value() == (oracle::spectral_radius(ad + bd) < 1.0));
            if (cd) CHECK(((ad + bd) * cd->v.values() - cd->v.values()).maxCoeff() < 0.0);
        }
    }
}

TEST_CASE("majorants and general systems") {
    const auto [am, bm] = majorant_continuous(m2(-6, -2, 1, -3), m2(-3, 0, 0, 0.5));
    CHECK(am.entries() == kA2);
    CHECK(bm.entries() == kB2);
    const auto [a_same, b_same] = majorant_continuous(kA2, kB2);
    CHECK(a_same.entries() == kA2);
    CHECK(b_same.entries() == kB2);
    const auto [ad, bd] = majorant_discrete(m2(-0.4, 0.1, 0.2, 0.6), -kB3);
    CHECK(ad.entries() == kA3);
    CHECK(bd.entries() == kB3);

    const auto g = synthesize_general_continuous(m2(-6, -2, 1, -3), m2(-3, 0, 0, 0.5));
    REQUIRE(g);
    CHECK(g->kind == CertificateKind::ContinuousGeneral);
    CHECK(verify_general_continuous(m2(-6, -2, 1, -3), m2(-3, 0, 0, 0.5), g->v).accepted());
    CHECK_FALSE(synthesize_general_continuous(Matrix::Constant(1, 1, -1), Matrix::Constant(1, 1, -2)));
    const auto gd = synthesize_general_discrete(m2(-0.4, 0.1, 0.2, 0.6), -kB3);
    REQUIRE(gd);
    CHECK(gd->kind == CertificateKind::DiscreteGeneral);
}
