#include "badapprox/params.hpp"

#include "badapprox/errors.hpp"

namespace badapprox {

void ConstructionParams::validate() const {
    if (d < 1) throw InvalidParams("d >= 1 required");
    if (m < 2) throw InvalidParams("M >= 2 required");
    if (t < 1) throw InvalidParams("t >= 1 required");
    if (tau <= 0) throw InvalidParams("tau > 0 required");
    if (tau.get_num() * d <= tau.get_den()) throw InvalidParams("tau > 1/d required (a*d > b for tau = a/b)");
    Integer fact = 1;
    for (unsigned i = 2; i <= d; ++i) fact *= i;
    if (pow(t, d) <= fact) throw InvalidParams("t^d > d! required (t^d <= d!)");
    if (u < 4) throw InvalidParams("u >= 4 required");
    if (max_stage < 1) throw InvalidParams("maxStage >= 1 required");
}

unsigned prune_level(const ConstructionParams& p, unsigned n) {
    Rational v = Rational(static_cast<long>(n) - 1 + static_cast<long>(p.u)) * (1 + p.tau) * p.d / (p.d + 1);
    return static_cast<unsigned>(floor(v).get_ui());
}

PowerRadius delta(const ConstructionParams& p, unsigned n) {
    Rational e = -Rational(static_cast<long>(n) - 1 + static_cast<long>(p.u)) * (1 + p.tau) * p.d;
    return PowerRadius(Rational(Integer(1), p.t), p.m, e);
}

PowerRadius dangerous_coeff(const ConstructionParams& p) {
    Rational e = -Rational(static_cast<long>(p.u)) * (1 + p.tau) * p.d;
    return PowerRadius(Rational(Integer(1), p.t), p.m, e);
}

ScheduleValue schedule(const ConstructionParams& p, unsigned n) {
    return ScheduleValue{n, prune_level(p, n), delta(p, n), dangerous_coeff(p)};
}

Rational target_dimension(const ConstructionParams& p) {
    Rational s = Rational(p.d + 1) / (1 + p.tau);
    s.canonicalize();
    return s;
}

unsigned band_of(const ConstructionParams& p, const Integer& q) {
    if (q < 1) throw std::invalid_argument("denominator must be positive");
    const Integer n = p.n();
    unsigned k = 1;
    Integer top = n;
    while (q >= top) {
        top *= n;
        ++k;
    }
    return k;
}

}  // namespace badapprox
