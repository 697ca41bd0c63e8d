#pragma once

#include <cmath>

namespace lognls {

// Neumaier compensated accumulator.  Quadrature identities in the test suite
// are checked at 1e-10 relative; plain summation over ~1e5 nodes would not
// reliably hold them.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

} // namespace lognls
