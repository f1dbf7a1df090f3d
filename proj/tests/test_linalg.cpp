#include "oracles.hpp"

#include "posdelay/error.hpp"
#include "posdelay/linalg.hpp"

#include <doctest.h>

using namespace posdelay;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& r : rows) {
        Index j = 0;
        for (double x : r) m(i, j++) = x;
        ++i;
    }
    return m;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

} // namespace

TEST_CASE("carriers validate their contents") {
    CHECK_THROWS_AS(PositiveVector(vec({1.0, 0.0})), ValidationError);
    CHECK_THROWS_AS(PositiveVector(vec({1.0, -1.0})), ValidationError);
    CHECK_THROWS_AS(PositiveVector{Vector()}, ValidationError);
    CHECK_THROWS_AS(PositiveVector(vec({1.0, NAN})), ValidationError);
    CHECK_THROWS_AS(MetzlerMatrix(mat({{-1, -0.1}, {0, -1}})), ValidationError);
    CHECK_THROWS_AS(MetzlerMatrix(Matrix(2, 3)), DimensionError);
    CHECK_THROWS_AS(NonnegativeMatrix(mat({{-1}})), ValidationError);
    CHECK_NOTHROW(MetzlerMatrix(mat({{-5, 1}, {0, 3}})));
    CHECK(PositiveVector(vec({3, 4})).normalized()[0] == doctest::Approx(0.6));
}

TEST_CASE("weighted_inf_norm") {
    CHECK(weighted_inf_norm(vec({1, 1}), PositiveVector::ones(2)) == 1.0);
    CHECK(weighted_inf_norm(Vector::Zero(3), PositiveVector(vec({1, 2, 3}))) == 0.0);
    const double expected = std::max(0.7645 / 0.9020, 0.6446 / 0.4317);
    CHECK(weighted_inf_norm(vec({0.7645, 0.6446}), PositiveVector(vec({0.9020, 0.4317}))) ==
          doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(1.4932).epsilon(1e-4));
    CHECK_THROWS_AS(weighted_inf_norm(vec({1, 2, 3}), PositiveVector::ones(2)), DimensionError);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x(4);
        for (Index i = 0; i < 4; ++i) x[i] = z(rng);
        const PositiveVector v(x.cwiseAbs().array() + 0.1);
        const double n = weighted_inf_norm(x, v);
        CHECK(n > 0.0);
        CHECK(weighted_inf_norm(-2.5 * x, v) == doctest::Approx(2.5 * n).epsilon(1e-14));
    }
}

TEST_CASE("hurwitz_certificate") {
    SUBCASE("Example 2 A+B solves M v = -1") {
        const auto v = hurwitz_certificate(MetzlerMatrix(mat({{-3, 2}, {1, -2.5}})));
        REQUIRE(v);
        // Cramer's rule by hand: det = 5.5, v = (9/11, 8/11).
        CHECK((*v)[0] == doctest::Approx(9.0 / 11.0).epsilon(1e-12));
        CHECK((*v)[1] == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
        CHECK((*v)[0] == doctest::Approx(0.8182).epsilon(1e-4));
        CHECK((*v)[1] == doctest::Approx(0.7273).epsilon(1e-4));
    }
    SUBCASE("unstable and identity cases") {
        CHECK_FALSE(hurwitz_certificate(MetzlerMatrix(mat({{1}}))));
        CHECK_FALSE(hurwitz_certificate(MetzlerMatrix(mat({{0}}))));
        const auto v = hurwitz_certificate(MetzlerMatrix(-Matrix::Identity(5, 5)));
        REQUIRE(v);
        CHECK(v->values().isApprox(Vector::Ones(5)));
    }
    SUBCASE("agrees with the eigenvalue oracle") {
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> dim(2, 8);
        std::uniform_real_distribution<double> shift(-1.0, 1.0);
        int checked = 0;
        for (int trial = 0; trial < 300; ++trial) {
            Matrix m = oracle::random_metzler(rng, dim(rng));
            m -= (oracle::spectral_abscissa(m) + shift(rng)) * Matrix::Identity(m.rows(), m.rows());
            const double mu = oracle::spectral_abscissa(m);
            if (std::abs(mu) < 1e-6) continue;
            ++checked;
            const auto v = hurwitz_certificate(MetzlerMatrix(m));
            CHECK(v.has_value() == (mu < 0.0));
            if (v) CHECK(((m * v->values()).array() < 0.0).all());
        }
        CHECK(checked > 250);
    }
}

TEST_CASE("spectral_abscissa") {
    const double tol = 1e-10;
    const double pi_ab = spectral_abscissa(MetzlerMatrix(mat({{-6, 2}, {1, -3}}) + mat({{3, 0}, {0, 0.5}})), tol);
    CHECK(std::abs(pi_ab + 1.3139) < 1e-3);
    CHECK(std::abs(pi_ab - (-2.75 + std::sqrt(0.0625 + 2.0))) < 1e-9);
    CHECK(spectral_abscissa(MetzlerMatrix(mat({{-1, 0}, {0, -2}})), tol) == doctest::Approx(-1.0).epsilon(1e-9));

    SUBCASE("3x3 matches the characteristic-polynomial roots") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 40; ++trial) {
            const Matrix m = oracle::random_metzler(rng, 3);
            // Characteristic polynomial s^3 + c2 s^2 + c1 s + c0, roots by companion matrix.
            const double c2 = -m.trace();
            const double c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                              m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
            const double c0 = -m.determinant();
            Matrix companion = Matrix::Zero(3, 3);
            companion(0, 0) = -c2;
            companion(0, 1) = -c1;
            companion(0, 2) = -c0;
            companion(1, 0) = 1.0;
            companion(2, 1) = 1.0;
            Eigen::EigenSolver<Matrix> es(companion, false);
            const double expected = es.eigenvalues().real().maxCoeff();
            CHECK(std::abs(spectral_abscissa(MetzlerMatrix(m), tol) - expected) < 1e-7);
        }
    }

    SUBCASE("shift equivariance") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> c(-5.0, 5.0);
        for (int trial = 0; trial < 30; ++trial) {
            const MetzlerMatrix m(oracle::random_metzler(rng, 4));
            const double shift = c(rng);
            CHECK(std::abs(spectral_abscissa(m.shifted(shift), tol) - spectral_abscissa(m, tol) - shift) <= 2 * tol);
        }
    }
}

TEST_CASE("perron_root") {
    const double tol = 1e-10;
    const NonnegativeMatrix ex3(mat({{0.7, 0.1}, {0.2, 0.7}}));
    CHECK(std::abs(perron_root(ex3, tol) - (0.7 + std::sqrt(0.02))) < 1e-9);
    CHECK(std::abs(perron_root(ex3, tol) - 0.8414) < 1e-3);
    CHECK(std::abs(perron_root(NonnegativeMatrix(mat({{0.4, 0}, {0, 0.9}})), tol) - 0.9) < 1e-9);
    CHECK(perron_root(NonnegativeMatrix(Matrix::Zero(3, 3)), tol) <= tol);

    // Fixed point of Example 3 at the optimum.
    const double g = 0.9320;
    const Matrix at = mat({{0.4, 0.1}, {0.2, 0.6}}) + std::pow(g, -5) * mat({{0.3, 0}, {0, 0.1}});
    CHECK(std::abs(perron_root(NonnegativeMatrix(at), tol) - 0.9320) < 1e-3);

    SUBCASE("monotone in the entries") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 40; ++trial) {
            const Matrix n = oracle::random_nonnegative(rng, 5);
            const Matrix bigger = n + oracle::random_nonnegative(rng, 5, 0.05);
            CHECK(perron_root(NonnegativeMatrix(n), tol) <= perron_root(NonnegativeMatrix(bigger), tol) + 2 * tol);
            CHECK(std::abs(perron_root(NonnegativeMatrix(n), tol) - oracle::spectral_radius(n)) < 1e-8);
        }
    }
}

TEST_CASE("perron_vector") {
    SUBCASE("Example 2") {
        const PositiveVector v = perron_vector(MetzlerMatrix(mat({{-3, 2}, {1, -2.5}})));
        CHECK(std::abs(v[0] - 0.7645) < 1e-3);
        CHECK(std::abs(v[1] - 0.6446) < 1e-3);
        CHECK(v.values().norm() == doctest::Approx(1.0));
    }
    SUBCASE("symmetric all-ones coupling") {
        const Index n = 5;
        const PositiveVector v = perron_vector(MetzlerMatrix(Matrix::Ones(n, n) - Matrix::Identity(n, n)));
        for (Index i = 0; i < n; ++i) CHECK(v[i] == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-8));
    }
    SUBCASE("Example 3 optimum matrix") {
        const PositiveVector v = perron_vector(MetzlerMatrix(mat({{0.82662, 0.1}, {0.2, 0.742208}})));
        CHECK(std::abs(v[0] - 0.6884) < 1e-2);
        CHECK(std::abs(v[1] - 0.7253) < 1e-2);
    }
    SUBCASE("reducible input") {
        CHECK_THROWS_AS(perron_vector(MetzlerMatrix(mat({{-1, 0}, {1, -2}}))), ReducibleMatrixError);
        CHECK(is_irreducible(mat({{0}})));
        CHECK_FALSE(is_irreducible(mat({{-1, 0}, {1, -2}})));
        const MetzlerMatrix fixed = perturb_to_irreducible(MetzlerMatrix(mat({{-1, 0}, {1, -2}})));
        CHECK(is_irreducible(fixed.entries()));
    }
    SUBCASE("matches the eigenvector oracle") {
        std::mt19937_64 rng(10);
        for (int trial = 0; trial < 40; ++trial) {
            Matrix m = oracle::random_metzler(rng, 4);
            m += 0.05 * Matrix::Ones(4, 4); // irreducible
            const PositiveVector v = perron_vector(MetzlerMatrix(m), 1e-12);
            CHECK((v.values() - oracle::perron_vector(m)).norm() < 1e-6);
        }
    }
}
