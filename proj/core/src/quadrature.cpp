#include "parsplit/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace parsplit {

void QuadratureConfig::validate() const {
    std::ostringstream msg;
    if (!(abs_tol > 0.0 && std::isfinite(abs_tol))) {
        msg << "quadrature abs_tol must be positive, got " << abs_tol;
    } else if (max_levels < 1) {
        msg << "quadrature max_levels must be at least 1, got " << max_levels;
    } else if (!(tail_sigmas > 0.0 && std::isfinite(tail_sigmas))) {
        msg << "quadrature tail_sigmas must be positive, got " << tail_sigmas;
    } else if (max_intervals < 1) {
        msg << "quadrature max_intervals must be at least 1";
    } else {
        return;
    }
    throw DomainError(msg.str());
}

}  // namespace parsplit
