#include "badapprox/power_radius.hpp"

#include "badapprox/errors.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace badapprox {

namespace {

std::atomic<std::size_t> g_budget{0};

std::size_t bits_of(const Integer& z) { return z == 0 ? 1 : mpz_sizeinbase(z.get_mpz_t(), 2); }

// RAII wrapper for an mpfr_t at a given precision.
class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

// lo/hi enclosure of a PowerRadius at precision prec (all quantities positive).
void enclose(const PowerRadius& r, mpfr_prec_t prec, Mpfr& lo, Mpfr& hi) {
    mpfr_set_q(lo.get(), r.coeff().get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi.get(), r.coeff().get_mpq_t(), MPFR_RNDU);
    Mpfr flo(prec), fhi(prec), tmp(prec);
    for (const auto& f : r.factors()) {
        const Integer& num = f.exp.get_num();
        const Integer& den = f.exp.get_den();
        if (!den.fits_ulong_p()) throw ComparisonBudgetExceeded();
        Integer mag = num < 0 ? Integer(-num) : num;
        if (!mag.fits_ulong_p()) throw ComparisonBudgetExceeded();
        // B^{|num|} exactly, then the den-th root with directed rounding.
        Integer power = pow(f.base, mag.get_ui());
        mpfr_set_z(flo.get(), power.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(fhi.get(), power.get_mpz_t(), MPFR_RNDU);
        mpfr_rootn_ui(flo.get(), flo.get(), den.get_ui(), MPFR_RNDD);
        mpfr_rootn_ui(fhi.get(), fhi.get(), den.get_ui(), MPFR_RNDU);
        if (num < 0) {
            mpfr_ui_div(tmp.get(), 1, fhi.get(), MPFR_RNDD);
            mpfr_ui_div(fhi.get(), 1, flo.get(), MPFR_RNDU);
            mpfr_set(flo.get(), tmp.get(), MPFR_RNDD);
        }
        mpfr_mul(lo.get(), lo.get(), flo.get(), MPFR_RNDD);
        mpfr_mul(hi.get(), hi.get(), fhi.get(), MPFR_RNDU);
    }
}

Rational mpfr_to_rational(mpfr_srcptr x) {
    Rational out;
    mpfr_get_q(out.get_mpq_t(), x);
    return out;
}

}  // namespace

std::size_t precision_budget_bits() {
    std::size_t b = g_budget.load();
    if (b == 0) {
        b = std::size_t{1} << 24;
        if (const char* env = std::getenv("BADAPPROX_PRECISION_BITS")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && v > 0) b = static_cast<std::size_t>(v);
        }
        g_budget.store(b);
    }
    return b;
}

void set_precision_budget_bits(std::size_t bits) { g_budget.store(bits); }

PowerRadius::PowerRadius(Rational coeff) : coeff_(std::move(coeff)) {
    if (coeff_ <= 0) throw std::invalid_argument("PowerRadius coefficient must be positive");
}

PowerRadius::PowerRadius(Rational coeff, Integer base, Rational exp) : PowerRadius(std::move(coeff)) {
    if (base < 1) throw std::invalid_argument("PowerRadius base must be positive");
    exp.canonicalize();
    factors_.push_back({std::move(base), std::move(exp)});
    normalize();
}

void PowerRadius::normalize() {
    std::sort(factors_.begin(), factors_.end(),
              [](const PowerFactor& a, const PowerFactor& b) { return a.base < b.base; });
    std::vector<PowerFactor> merged;
    for (auto& f : factors_) {
        if (f.base == 1) continue;
        if (!merged.empty() && merged.back().base == f.base) {
            merged.back().exp += f.exp;
        } else {
            merged.push_back(std::move(f));
        }
    }
    std::erase_if(merged, [](const PowerFactor& f) { return f.exp == 0; });
    // Integer parts of exponents fold into the coefficient when small.
    for (auto& f : merged) {
        if (f.exp.get_den() == 1 && bits_of(f.exp.get_num()) <= 31 &&
            std::labs(f.exp.get_num().get_si()) * static_cast<long>(bits_of(f.base)) <= 65536) {
            long e = f.exp.get_num().get_si();
            coeff_ *= badapprox::pow(Rational(f.base), e);
            f.exp = 0;
        }
    }
    std::erase_if(merged, [](const PowerFactor& f) { return f.exp == 0; });
    factors_ = std::move(merged);
}

std::optional<Rational> PowerRadius::rational_value() const {
    if (factors_.empty()) return coeff_;
    Integer num = coeff_.get_num();
    Integer den = coeff_.get_den();
    double est = 0;
    for (const auto& f : factors_) {
        if (f.exp.get_den() != 1) return std::nullopt;
        est += std::fabs(f.exp.get_d()) * static_cast<double>(bits_of(f.base));
    }
    if (est > static_cast<double>(precision_budget_bits())) throw ComparisonBudgetExceeded();
    for (const auto& f : factors_) {
        const Integer& e = f.exp.get_num();
        if (e > 0) {
            num *= badapprox::pow(f.base, e.get_ui());
        } else {
            Integer m = -e;
            den *= badapprox::pow(f.base, m.get_ui());
        }
    }
    Rational out(num, den);
    out.canonicalize();
    return out;
}

PowerRadius PowerRadius::operator*(const PowerRadius& other) const {
    PowerRadius out(coeff_ * other.coeff_);
    out.factors_ = factors_;
    out.factors_.insert(out.factors_.end(), other.factors_.begin(), other.factors_.end());
    out.normalize();
    return out;
}

PowerRadius PowerRadius::operator*(const Rational& r) const {
    PowerRadius out = *this;
    out.coeff_ *= r;
    if (out.coeff_ <= 0) throw std::invalid_argument("PowerRadius scaled to a non-positive value");
    return out;
}

PowerRadius PowerRadius::inverse() const {
    PowerRadius out(1 / coeff_);
    for (const auto& f : factors_) out.factors_.push_back({f.base, -f.exp});
    return out;
}

PowerRadius PowerRadius::operator/(const PowerRadius& other) const { return *this * other.inverse(); }

PowerRadius PowerRadius::pow(const Rational& e) const {
    PowerRadius out(1);
    if (e.get_den() == 1) {
        out.coeff_ = badapprox::pow(coeff_, e.get_num().get_si());
    } else if (coeff_ != 1) {
        // c^{a/b}: express the coefficient through its numerator and denominator.
        const Integer& cn = coeff_.get_num();
        const Integer& cd = coeff_.get_den();
        if (cn != 1) out.factors_.push_back({cn, e});
        if (cd != 1) out.factors_.push_back({cd, Rational(-e)});
    }
    for (const auto& f : factors_) out.factors_.push_back({f.base, Rational(f.exp * e)});
    out.normalize();
    return out;
}

double PowerRadius::log2_estimate() const {
    auto log2z = [](const Integer& z) {
        long exp = 0;
        double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
        return std::log2(m) + static_cast<double>(exp);
    };
    double v = log2z(coeff_.get_num()) - log2z(coeff_.get_den());
    for (const auto& f : factors_) v += f.exp.get_d() * log2z(f.base);
    return v;
}

Rational PowerRadius::upper_bound() const {
    if (auto v = rational_value()) return *v;
    Mpfr lo(64), hi(64);
    enclose(*this, 64, lo, hi);
    return mpfr_to_rational(hi.get());
}

Rational PowerRadius::lower_bound() const {
    if (auto v = rational_value()) return *v;
    Mpfr lo(64), hi(64);
    enclose(*this, 64, lo, hi);
    return mpfr_to_rational(lo.get());
}

bool operator==(const PowerRadius& a, const PowerRadius& b) { return cmp_power(a, b) == 0; }

std::strong_ordering cmp_power(const PowerRadius& a, const PowerRadius& b) {
    const PowerRadius ratio = a / b;
    if (auto v = ratio.rational_value()) return compare(*v, Rational(1));

    Integer D = 1;
    for (const auto& f : ratio.factors()) D = lcm(D, f.exp.get_den());

    // Bit-size estimate of both sides after raising to the D-th power.
    const std::size_t budget = precision_budget_bits();
    if (!D.fits_ulong_p() || bits_of(D) > 40) throw ComparisonBudgetExceeded();
    const unsigned long d = D.get_ui();
    double est = static_cast<double>(d) *
                 static_cast<double>(bits_of(ratio.coeff().get_num()) + bits_of(ratio.coeff().get_den()));
    for (const auto& f : ratio.factors())
        est += std::fabs(Rational(f.exp * D).get_d()) * static_cast<double>(bits_of(f.base));
    if (est > static_cast<double>(budget)) throw ComparisonBudgetExceeded();

    Integer lhs = pow(ratio.coeff().get_num(), d);
    Integer rhs = pow(ratio.coeff().get_den(), d);
    for (const auto& f : ratio.factors()) {
        Rational scaled = f.exp * D;
        Integer e = scaled.get_num();
        if (e > 0) {
            lhs *= pow(f.base, e.get_ui());
        } else {
            Integer m = -e;
            rhs *= pow(f.base, m.get_ui());
        }
    }
    int c = cmp(lhs, rhs);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::strong_ordering cmp_power(const Rational& a, const PowerRadius& b) {
    if (a <= 0) return std::strong_ordering::less;
    return cmp_power(PowerRadius(a), b);
}

std::strong_ordering cmp_sum(const Rational& x, const std::vector<PowerRadius>& terms) {
    Rational exact = 0;
    bool all_rational = true;
    for (const auto& t : terms) {
        if (auto v = t.rational_value()) {
            exact += *v;
        } else {
            all_rational = false;
        }
    }
    if (all_rational) return compare(x, exact);
    if (terms.size() == 1) return cmp_power(x, terms.front());

    const std::size_t budget = precision_budget_bits();
    for (mpfr_prec_t prec = 64; static_cast<std::size_t>(prec) <= budget; prec *= 2) {
        Mpfr lo_sum(prec), hi_sum(prec), lo(prec), hi(prec), xv_lo(prec), xv_hi(prec);
        mpfr_set_zero(lo_sum.get(), 1);
        mpfr_set_zero(hi_sum.get(), 1);
        for (const auto& t : terms) {
            enclose(t, prec, lo, hi);
            mpfr_add(lo_sum.get(), lo_sum.get(), lo.get(), MPFR_RNDD);
            mpfr_add(hi_sum.get(), hi_sum.get(), hi.get(), MPFR_RNDU);
        }
        mpfr_set_q(xv_lo.get(), x.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(xv_hi.get(), x.get_mpq_t(), MPFR_RNDU);
        if (mpfr_less_p(xv_hi.get(), lo_sum.get())) return std::strong_ordering::less;
        if (mpfr_greater_p(xv_lo.get(), hi_sum.get())) return std::strong_ordering::greater;
    }
    throw ComparisonBudgetExceeded();
}

std::string to_string(const PowerRadius& r) {
    std::string out = to_string(r.coeff());
    for (const auto& f : r.factors()) out += " * " + f.base.get_str() + "^(" + to_string(f.exp) + ")";
    return out;
}

}  // namespace badapprox
