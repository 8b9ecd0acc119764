#include "speedprior/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace speedprior {

Rational pow2(long exponent)
{
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent >= 0) {
        return Rational(p);
    }
    return Rational(mpz_class(1), p);
}

Rational parse_rational(std::string_view text)
{
    auto parse_int = [&](std::string_view s) {
        if (s.empty()) {
            throw std::invalid_argument("malformed rational: \"" + std::string(text) + "\"");
        }
        std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (start == s.size()) {
            throw std::invalid_argument("malformed rational: \"" + std::string(text) + "\"");
        }
        for (std::size_t i = start; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') {
                throw std::invalid_argument("malformed rational: \"" + std::string(text) + "\"");
            }
        }
        return mpz_class(std::string(s[0] == '+' ? s.substr(1) : s), 10);
    };

    const auto slash = text.find('/');
    mpz_class num = parse_int(text.substr(0, slash));
    mpz_class den = slash == std::string_view::npos ? mpz_class(1) : parse_int(text.substr(slash + 1));
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator: \"" + std::string(text) + "\"");
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q)
{
    if (q.get_den() == 1) {
        return q.get_num().get_str();
    }
    return q.get_str();
}

std::string numerator_string(const Rational& q) { return q.get_num().get_str(); }
std::string denominator_string(const Rational& q) { return q.get_den().get_str(); }

namespace {

double ln_mpz(const mpz_class& z)
{
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

double approx_ln(const Rational& q)
{
    if (sgn(q) <= 0) {
        return -INFINITY;
    }
    return ln_mpz(q.get_num()) - ln_mpz(q.get_den());
}

double approx_double(const Rational& q) { return q.get_d(); }

bool certified_le_minus_two_ln(std::uint64_t n, const Rational& q)
{
    // n <= -2 ln q  <=>  q^2 e^n <= 1. Replace e by an upper bound.
    if (sgn(q) <= 0) {
        return true;
    }
    static const Rational e_upper("2718281828459045235360287471353/1000000000000000000000000000000");
    mpz_class num;
    mpz_class den;
    mpz_pow_ui(num.get_mpz_t(), e_upper.get_num().get_mpz_t(), n);
    mpz_pow_ui(den.get_mpz_t(), e_upper.get_den().get_mpz_t(), n);
    Rational lhs = q * q * Rational(num, den);
    lhs.canonicalize();
    return lhs <= 1;
}

bool certified_le_minus_two_ln(const Rational& loss, const Rational& q)
{
    // a/b <= -2 ln q  <=>  q^(2b) e^a <= 1.
    if (sgn(loss) < 0) {
        throw std::invalid_argument("loss must be nonnegative");
    }
    if (loss.get_den() == 1) {
        return certified_le_minus_two_ln(loss.get_num().get_ui(), q);
    }
    if (sgn(q) <= 0) {
        return true;
    }
    static const Rational e_upper("2718281828459045235360287471353/1000000000000000000000000000000");
    const unsigned long a = loss.get_num().get_ui();
    const unsigned long b = loss.get_den().get_ui();
    mpz_class num;
    mpz_class den;
    mpz_pow_ui(num.get_mpz_t(), e_upper.get_num().get_mpz_t(), a);
    mpz_pow_ui(den.get_mpz_t(), e_upper.get_den().get_mpz_t(), a);
    mpz_class qn;
    mpz_class qd;
    mpz_pow_ui(qn.get_mpz_t(), q.get_num().get_mpz_t(), 2 * b);
    mpz_pow_ui(qd.get_mpz_t(), q.get_den().get_mpz_t(), 2 * b);
    return qn * num <= qd * den;
}

}  // namespace speedprior
