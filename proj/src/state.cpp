#include "tflow/state.hpp"

#include <cmath>

namespace tflow {

bool all_finite(const ScalarField& f) {
    for (double v : f.a)
        if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const State& s) {
    return all_finite(s.u.x) && all_finite(s.u.y) && all_finite(s.phi) &&
           all_finite(s.psi.x) && all_finite(s.psi.y) && all_finite(s.mu) &&
           all_finite(s.pi);
}

}  // namespace tflow
