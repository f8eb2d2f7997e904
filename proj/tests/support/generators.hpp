#pragma once

// Deterministic random generators shared by the test suites.

#include <random>
#include <vector>

#include "qdirac/qcore.hpp"

namespace qdirac_test {

// Polynomial with closed-form q-derivative: D_q x^k = [k]_q x^{k-1}.
struct Poly {
    std::vector<double> coeffs;  // coeffs[k] multiplies x^k

    double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
        return acc;
    }

    Poly q_derivative(double q) const {
        Poly d;
        if (coeffs.size() <= 1) {
            d.coeffs = {0.0};
            return d;
        }
        d.coeffs.resize(coeffs.size() - 1);
        double qk = 1.0;  // q^k
        for (std::size_t k = 1; k < coeffs.size(); ++k) {
            qk *= q;
            // [k]_q = (1 - q^k) / (1 - q)
            d.coeffs[k - 1] = coeffs[k] * (1.0 - qk) / (1.0 - q);
        }
        return d;
    }
};

inline Poly random_poly(std::mt19937& rng, int max_degree = 6) {
    std::uniform_int_distribution<int> deg(1, max_degree);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    Poly p;
    p.coeffs.resize(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& c : p.coeffs) c = coeff(rng);
    return p;
}

inline qdirac::LatticeFn sample_poly(const qdirac::QLatticePtr& lat,
                                     const Poly& p) {
    return qdirac::sample(lat, [&](double x) { return p(x); }, p.coeffs[0]);
}

inline qdirac::LatticeFn random_table(const qdirac::QLatticePtr& lat,
                                      std::mt19937& rng, double bound) {
    std::uniform_real_distribution<double> val(-bound, bound);
    std::vector<double> values(lat->nodes.size());
    for (auto& v : values) v = val(rng);
    return qdirac::LatticeFn(lat, std::move(values));
}

}  // namespace qdirac_test
