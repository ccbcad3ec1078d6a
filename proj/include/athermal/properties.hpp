#pragma once

// Randomised checks of the structural properties of D(.||gamma): affinity gap,
// subextensivity, additivity, asymptotic continuity, and the two-level closed form.

#include <cstddef>
#include <cstdint>

namespace athermal {

struct PropertySummary {
    std::uint64_t seed = 0;
    std::size_t instances = 0;
    std::size_t max_dimension = 0;
    std::size_t affinity_violations = 0;
    std::size_t subextensivity_violations = 0;
    std::size_t additivity_violations = 0;
    std::size_t continuity_violations = 0;
    std::size_t closed_form_violations = 0;
    double worst_affinity_excess = 0.0;  // max of gap - h(p) and -gap, nats
    double worst_subextensivity_excess = 0.0;
    double worst_additivity_error = 0.0;
    double worst_continuity_ratio = 0.0;  // max lhs / rhs
    double worst_closed_form_error = 0.0;

    std::size_t violations() const noexcept {
        return affinity_violations + subextensivity_violations + additivity_violations + continuity_violations +
               closed_form_violations;
    }
};

/// Each instance draws a dimension d <= max_dimension, a Hamiltonian, beta in
/// [0.1, 5] and random states; tensor products are kept at dimension <= max_dimension.
PropertySummary run_property_checks(std::uint64_t seed, std::size_t instances, std::size_t max_dimension = 16);

}  // namespace athermal
