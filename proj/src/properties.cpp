#include "athermal/properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "athermal/core.hpp"
#include "athermal/error.hpp"

namespace athermal {

namespace {

constexpr double kSlack = 1e-9;
constexpr double kAdditivityTolerance = 1e-10;

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

DensityMatrix random_state(std::size_t d, std::mt19937_64& rng) { return random_density_matrix(d, rng, draw(rng, 1, d)); }

}  // namespace

PropertySummary run_property_checks(std::uint64_t seed, std::size_t instances, std::size_t max_dimension) {
    require(max_dimension >= 4, ErrorCode::InvalidParameter, "property checks need max_dimension >= 4");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PropertySummary s;
    s.seed = seed;
    s.instances = instances;
    s.max_dimension = max_dimension;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t d = draw(rng, 2, max_dimension);
        const double beta = 0.1 + 4.9 * unit(rng);
        const Hamiltonian h = random_hamiltonian(d, rng, 0.5 + 4.5 * unit(rng));
        const GibbsState gamma = gibbs_state(h, beta);
        const DensityMatrix g = gamma.density();
        const DensityMatrix rho = random_state(d, rng);
        const DensityMatrix sigma = random_state(d, rng);

        // Affinity gap.
        const double p = unit(rng);
        const double gap = p * relative_entropy(rho, g) + (1.0 - p) * relative_entropy(sigma, g) -
                           relative_entropy(mix(p, rho, sigma), g);
        const double affinity_excess = std::max(-gap, gap - binary_entropy(p));
        s.worst_affinity_excess = std::max(s.worst_affinity_excess, affinity_excess);
        if (affinity_excess > kSlack) ++s.affinity_violations;

        // Subextensivity on the top level.
        const double top = relative_entropy(DensityMatrix::basis_state(d, h.max_level()), g);
        const double sub_excess = top - (beta * h.max_energy() + std::log(static_cast<double>(d)));
        s.worst_subextensivity_excess = std::max(s.worst_subextensivity_excess, sub_excess);
        if (sub_excess > kSlack) ++s.subextensivity_violations;

        // Additivity over a second system keeping the product within max_dimension.
        const std::size_t d1 = draw(rng, 2, max_dimension / 2);
        const std::size_t d2 = draw(rng, 2, max_dimension / d1);
        const Hamiltonian h1 = random_hamiltonian(d1, rng, 3.0);
        const Hamiltonian h2 = random_hamiltonian(d2, rng, 3.0);
        const DensityMatrix g1 = gibbs_state(h1, beta).density();
        const DensityMatrix g2 = gibbs_state(h2, beta).density();
        const DensityMatrix r1 = random_state(d1, rng);
        const DensityMatrix r2 = random_state(d2, rng);
        const double joint = relative_entropy(tensor(r1, r2), gibbs_state(tensor(h1, h2), beta).density());
        const double add_err = std::abs(joint - relative_entropy(r1, g1) - relative_entropy(r2, g2));
        s.worst_additivity_error = std::max(s.worst_additivity_error, add_err);
        if (!(add_err <= kAdditivityTolerance)) ++s.additivity_violations;

        // Continuity: half the pairs are close (a small admixture), half arbitrary.
        const DensityMatrix other = (i % 2 == 0) ? mix(1.0 - 0.05 * unit(rng), rho, sigma) : sigma;
        const auto cont = continuity_bound_check(rho, other, gamma, subextensivity_constant(h, beta), kAffinityConstant);
        if (cont.rhs > 0.0) s.worst_continuity_ratio = std::max(s.worst_continuity_ratio, cont.lhs / cont.rhs);
        if (!cont.holds) ++s.continuity_violations;

        // Two-level closed form h(q) - h(p) + beta (p - q).
        const double pe = unit(rng);
        const double q = two_level_excitation(beta);
        const double probs[2] = {1.0 - pe, pe};
        const double numeric = relative_entropy(DensityMatrix::diagonal(std::span<const double>(probs, 2)),
                                                gibbs_state(Hamiltonian::two_level(), beta).density());
        const double closed = binary_entropy(q) - binary_entropy(pe) + beta * (pe - q);
        const double cf_err = std::abs(numeric - closed);
        s.worst_closed_form_error = std::max(s.worst_closed_form_error, cf_err);
        if (!(cf_err <= 1e-10)) ++s.closed_form_violations;
    }
    return s;
}

}  // namespace athermal
