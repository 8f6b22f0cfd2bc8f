#pragma once

namespace crt {

/// Catmull-Rom weights for the four nodes around local coordinate u in [0, 1].
inline void catmull_rom_weights(double u, double w[4]) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    w[0] = 0.5 * (-u3 + 2.0 * u2 - u);
    w[1] = 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0);
    w[2] = 0.5 * (-3.0 * u3 + 4.0 * u2 + u);
    w[3] = 0.5 * (u3 - u2);
}

/// Value at a stencil index of a length-n array, with quadratic ghost
/// extrapolation one node past each end (keeps node values exact).
template <class F>
double fetch_with_ghosts(F&& f, int n, int idx) {
    if (idx < 0) return 3.0 * f(0) - 3.0 * f(1) + f(2);
    if (idx >= n) return 3.0 * f(n - 1) - 3.0 * f(n - 2) + f(n - 3);
    return f(idx);
}

} // namespace crt
