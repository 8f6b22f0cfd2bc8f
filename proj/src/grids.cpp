#include "crt/grids.hpp"

#include "crt/errors.hpp"

namespace crt {

void SGrid::validate() const {
    if (!(s_min < -1.0 && 1.0 < s_max)) {
        throw InsufficientGrid("SGrid must pad past [-1, 1]: need s_min < -1 < 1 < s_max");
    }
    if (n_s < 16) throw InsufficientGrid("SGrid needs n_s >= 16");
}

void YGrid::validate(int k) const {
    if (n_y < k + 2) throw InsufficientGrid("YGrid needs n_y >= k + 2");
}

void PhiGrid::validate() const {
    if (n_phi < 2 || n_phi % 2 != 0) throw InsufficientGrid("PhiGrid needs an even n_phi >= 2");
}

} // namespace crt
