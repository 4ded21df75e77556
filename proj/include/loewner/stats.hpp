#pragma once

#include <functional>
#include <string>
#include <vector>

namespace loewner {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

// Asymptotic Kolmogorov tail Q(λ) = 2 Σ (−1)^{k−1} exp(−2k²λ²).
double kolmogorov_tail(double lambda);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

struct Summary {
    double mean = 0.0;
    double stderr_mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

Summary summarize(const std::vector<double>& v);
double median(std::vector<double> v);

}  // namespace loewner
