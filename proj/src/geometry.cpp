#include "capcav/geometry.hpp"

#include "capcav/errors.hpp"

namespace capcav {

void LayeredFiberGeometry::validate() const {
    if (!(d_out_nm > 0.0)) throw DomainError("d_out must be positive");
    if (d_in_nm < 0.0) throw DomainError("d_in must be non-negative");
    if (!(d_in_nm < d_out_nm)) {
        throw DomainError("degenerate geometry: d_in must be smaller than d_out");
    }
}

} // namespace capcav
