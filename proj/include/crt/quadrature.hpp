#pragma once

#include <vector>

namespace crt {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

/// Cached rule of order n (n >= 1). The returned reference stays valid for
/// the lifetime of the process; lookup is thread-safe.
const GaussLegendre& gauss_legendre(int n);

} // namespace crt
