#pragma once

#include "heliumjcm/units.hpp"
#include "heliumjcm/vertical.hpp"

namespace testing {

inline const heliumjcm::MaterialProperties& he3() {
    static const heliumjcm::MaterialProperties m = heliumjcm::material_for(heliumjcm::Isotope::He3);
    return m;
}

// Vertical spectra are the slow part of most tests; cache the common ones.
inline const heliumjcm::VerticalSpectrum& vertical_at(double e_v_per_cm) {
    if (e_v_per_cm == 15.0) {
        static const auto vs = heliumjcm::solve_vertical(he3(), heliumjcm::volts_per_cm(15.0), 6);
        return vs;
    }
    if (e_v_per_cm == 20.0) {
        static const auto vs = heliumjcm::solve_vertical(he3(), heliumjcm::volts_per_cm(20.0), 6);
        return vs;
    }
    static const auto vs = heliumjcm::solve_vertical(he3(), heliumjcm::volts_per_cm(25.0), 6);
    return vs;
}

} // namespace testing
