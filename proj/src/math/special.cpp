#include "faultcast/math/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace faultcast::math {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 500;

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double fpmin = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
    const double fpmin = std::numeric_limits<double>::min() / kEps;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // Asymptotic series in 1/x^2.
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv;
    result -= inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
              inv2 * (1.0 / 252.0 -
              inv2 * (1.0 / 240.0 -
              inv2 * (1.0 / 132.0)))));
    return result;
}

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double gamma_p_inv(double a, double p) {
    if (!(a > 0.0) || p < 0.0 || p > 1.0) throw std::domain_error("gamma_p_inv: bad arguments");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    // Wilson-Hilferty starting value, then safeguarded Newton.
    double x;
    {
        const double t = std::sqrt(-2.0 * std::log(p < 0.5 ? p : 1.0 - p));
        double z = t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t));
        if (p < 0.5) z = -z;
        const double wh = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
        x = a * wh * wh * wh;
        if (!(x > 0.0)) x = a * std::exp((std::log(p) + std::lgamma(a + 1.0)) / a);
        if (!(x > 0.0) || !std::isfinite(x)) x = a;
    }
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    const double lga = std::lgamma(a);
    for (int it = 0; it < 200; ++it) {
        const double f = gamma_p(a, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        const double lpdf = (a - 1.0) * std::log(x) - x - lga;
        const double step = f * std::exp(-lpdf);
        double xn = x - step;
        if (!(xn > lo) || !(xn < hi) || !std::isfinite(xn)) {
            xn = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
        }
        if (std::fabs(xn - x) <= 1e-14 * (x + 1e-300)) { x = xn; break; }
        x = xn;
    }
    return x;
}

double inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0)
        throw std::domain_error("inc_beta: bad arguments");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_log_pdf(double t, double df) {
    if (!(df > 0.0)) throw std::domain_error("student_t_log_pdf: df must be > 0");
    return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
           0.5 * std::log(df * M_PI) -
           0.5 * (df + 1.0) * std::log1p(t * t / df);
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw std::domain_error("student_t_cdf: df must be > 0");
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double tail = 0.5 * inc_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("student_t_quantile: p in (0,1)");
    if (p == 0.5) return 0.0;
    // Bracket then Newton with bisection safeguard.
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = student_t_cdf(t, df) - p;
        if (f > 0.0) hi = t; else lo = t;
        const double step = f * std::exp(-student_t_log_pdf(t, df));
        double tn = t - step;
        if (!(tn > lo) || !(tn < hi) || !std::isfinite(tn)) tn = 0.5 * (lo + hi);
        if (std::fabs(tn - t) <= 1e-14 * (std::fabs(t) + 1.0)) { t = tn; break; }
        t = tn;
    }
    return t;
}

double student_t_dlogpdf_ddf(double t, double df) {
    const double z2 = t * t;
    return 0.5 * digamma(0.5 * (df + 1.0)) - 0.5 * digamma(0.5 * df) -
           0.5 / df - 0.5 * std::log1p(z2 / df) +
           0.5 * (df + 1.0) * z2 / (df * (df + z2));
}

}  // namespace faultcast::math
