#include "posdelay/vecfield.hpp"

#include "posdelay/error.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace posdelay {

namespace {

constexpr double kHomogeneityTol = 1e-9;
constexpr double kCooperativeTol = 1e-6;
constexpr double kOrderTol = 1e-9;
constexpr double kScalings[] = {0.5, 2.0, 3.7};

// Components log-uniform in [1e-2, 1e2].
Vector sample_positive(Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> exponent(-2.0, 2.0);
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = std::pow(10.0, exponent(rng));
    return x;
}

void require_trials(int trials) {
    if (trials < 1) throw PreconditionError("probe: trials must be at least 1");
}

} // namespace

std::string to_string(FieldClass c) {
    switch (c) {
    case FieldClass::Cooperative: return "cooperative";
    case FieldClass::OrderPreserving: return "order-preserving";
    case FieldClass::Unclassified: break;
    }
    return "unclassified";
}

HomogeneousField::HomogeneousField(std::variant<FieldExpr, Matrix> body, Index n, double degree,
                                   FieldClass declared)
    : body_(std::move(body)), dimension_(n), degree_(degree), declared_(declared) {
    if (!(degree_ > 0.0) || !std::isfinite(degree_)) {
        throw ValidationError("HomogeneousField: degree must be a positive real");
    }
    Vector at_zero;
    try {
        at_zero = evaluate_raw(Vector::Zero(n));
    } catch (const DomainError&) {
        return; // undefined at the origin as written; extended by continuity
    }
    if ((at_zero.array() != 0.0).any()) {
        throw ValidationError("HomogeneousField: field must vanish at the origin");
    }
}

HomogeneousField HomogeneousField::from_expressions(FieldExpr body, double degree, FieldClass declared) {
    const auto n = static_cast<Index>(body.dimension());
    return HomogeneousField(std::move(body), n, degree, declared);
}

HomogeneousField HomogeneousField::linear(Matrix m, std::optional<FieldClass> declared) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("HomogeneousField: linear form needs a non-empty square matrix");
    }
    if (!m.allFinite()) throw ValidationError("HomogeneousField: matrix entries must be finite");
    FieldClass cls = FieldClass::Unclassified;
    if (declared) {
        cls = *declared;
    } else if (is_nonnegative(m)) {
        cls = FieldClass::OrderPreserving;
    } else if (is_metzler(m)) {
        cls = FieldClass::Cooperative;
    }
    const Index n = m.rows();
    return HomogeneousField(std::move(m), n, 1.0, cls);
}

HomogeneousField HomogeneousField::zero(Index n) {
    return linear(Matrix::Zero(n, n));
}

Vector HomogeneousField::evaluate_raw(const Vector& x) const {
    if (const Matrix* m = matrix()) return (*m) * x;
    const FieldExpr& e = std::get<FieldExpr>(body_);
    Vector out(dimension_);
    const std::span<const double> vars(x.data(), static_cast<std::size_t>(x.size()));
    for (Index i = 0; i < dimension_; ++i) {
        out[i] = posdelay::evaluate(*e.components()[static_cast<std::size_t>(i)], vars);
    }
    return out;
}

Vector HomogeneousField::evaluate(const Vector& x) const {
    if (x.size() != dimension_) {
        throw DimensionError("HomogeneousField::evaluate: expected dimension " + std::to_string(dimension_) +
                             ", got " + std::to_string(x.size()));
    }
    if (is_linear() || !x.isZero(0.0)) return evaluate_raw(x);
    try {
        return evaluate_raw(x);
    } catch (const DomainError&) {
        return Vector::Zero(dimension_);
    }
}

std::string HomogeneousField::describe() const {
    std::ostringstream out;
    out.precision(17);
    if (const Matrix* m = matrix()) {
        out << "linear";
        for (Index i = 0; i < m->rows(); ++i) {
            out << (i ? ";" : " [");
            for (Index j = 0; j < m->cols(); ++j) out << (j ? "," : "") << (*m)(i, j);
        }
        out << "]";
    } else {
        out << "expr";
        for (const auto& s : std::get<FieldExpr>(body_).to_strings()) out << " " << s << ";";
    }
    out << " degree=" << degree_;
    return out.str();
}

ProbeVerdict probe_homogeneity(const HomogeneousField& field, double alpha, int trials, std::uint64_t seed) {
    require_trials(trials);
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        const Vector x = sample_positive(field.dimension(), rng);
        const Vector fx = field.evaluate(x);
        const double scale = 1.0 + fx.cwiseAbs().maxCoeff();
        for (double lambda : kScalings) {
            const Vector lhs = field.evaluate(lambda * x);
            const double err = (lhs - std::pow(lambda, alpha) * fx).cwiseAbs().maxCoeff();
            if (!(err <= kHomogeneityTol * scale)) {
                std::ostringstream msg;
                msg << "f(l x) - l^" << alpha << " f(x) has norm " << err << " at l=" << lambda;
                return {false, ProbeVerdict::Counterexample{x, Vector(), lambda, msg.str()}};
            }
        }
    }
    return {};
}

ProbeVerdict probe_cooperative(const HomogeneousField& field, int trials, std::uint64_t seed) {
    require_trials(trials);
    std::mt19937_64 rng(seed);
    const Index n = field.dimension();
    for (int t = 0; t < trials; ++t) {
        const Vector x = sample_positive(n, rng);
        const double h = 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff());
        for (Index j = 0; j < n; ++j) {
            Vector xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Vector column = (field.evaluate(xp) - field.evaluate(xm)) / (2.0 * h);
            for (Index i = 0; i < n; ++i) {
                if (i != j && !(column[i] >= -kCooperativeTol)) {
                    std::ostringstream msg;
                    msg << "Jacobian entry (" << i + 1 << "," << j + 1 << ") = " << column[i];
                    return {false, ProbeVerdict::Counterexample{x, Vector(), 0.0, msg.str()}};
                }
            }
        }
    }
    return {};
}

ProbeVerdict probe_order_preserving(const HomogeneousField& field, int trials, std::uint64_t seed) {
    require_trials(trials);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution rare(0.2);
    const Index n = field.dimension();
    for (int t = 0; t < trials; ++t) {
        Vector y = sample_positive(n, rng);
        Vector gap = sample_positive(n, rng);
        for (Index i = 0; i < n; ++i) {
            if (rare(rng)) y[i] = 0.0;
            if (coin(rng)) gap[i] = 0.0;
        }
        const Vector x = y + gap;
        const Vector gx = field.evaluate(x);
        const Vector gy = field.evaluate(y);
        for (Index i = 0; i < n; ++i) {
            if (!(gx[i] >= gy[i] - kOrderTol)) {
                std::ostringstream msg;
                msg << "component " << i + 1 << ": g(x) = " << gx[i] << " < g(y) = " << gy[i];
                return {false, ProbeVerdict::Counterexample{x, y, 0.0, msg.str()}};
            }
        }
    }
    return {};
}

} // namespace posdelay
