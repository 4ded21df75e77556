#include "loewner/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loewner {

double kolmogorov_tail(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

namespace {
// Stephens' small-sample correction of the asymptotic argument.
double corrected_p(double d, double n_eff) {
    double root = std::sqrt(n_eff);
    return kolmogorov_tail((root + 0.12 + 0.11 / root) * d);
}
}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    KsResult r;
    r.statistic = d;
    r.n_a = a.size();
    r.n_b = b.size();
    r.p_value = d == 0.0 ? 1.0 : corrected_p(d, na * nb / (na + nb));
    return r;
}

KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw std::invalid_argument("empty sample");
    std::sort(a.begin(), a.end());
    double n = static_cast<double>(a.size()), d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double F = cdf(a[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    KsResult r;
    r.statistic = d;
    r.n_a = a.size();
    r.p_value = corrected_p(d, n);
    return r;
}

Summary summarize(const std::vector<double>& v) {
    Summary s;
    s.n = v.size();
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / s.n;
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_mean = s.n > 1 ? std::sqrt(ss / (s.n - 1) / s.n) : 0.0;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    return s;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("empty sample");
    std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + m);
    return 0.5 * (lo + hi);
}

}  // namespace loewner
