#include "fusedrf/math.hpp"

#include <cmath>
#include <limits>

namespace fusedrf {

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus_inverse(double y) {
    if (y <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    // log(exp(y) - 1) = y + log(1 - exp(-y))
    return y + std::log(-std::expm1(-y));
}

double logit(double y) {
    if (y <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (y >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::log(y) - std::log1p(-y);
}

}  // namespace fusedrf
