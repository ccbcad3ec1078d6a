#pragma once

// Work extraction from d-level quasiclassical resources. Occupation counts of
// n resource systems and ell Gibbs systems are reshuffled; the energy released
// goes to an entropy-free work ledger.

#include <cstddef>
#include <vector>

#include "athermal/core.hpp"
#include "athermal/typeclass.hpp"

namespace athermal {

/// Per-level occupation change: delta_i counts leave level i (n x_i in
/// continuum notation). Output counts are input counts minus delta.
struct OccupationShift {
    std::vector<Count> delta;
    Count n = 1;  // scale for x = delta / n

    std::vector<double> x() const;
    double work(const Hamiltonian& h) const;  // H . delta
};

struct UnitarityResult {
    bool holds = false;
    double margin = 0.0;  // ln M(out) - ln M(resource) - ln M(bath), nats
    bool exact = false;
};

/// Exact multinomial inequality M(resource) M(bath) <= M(resource + bath - delta).
UnitarityResult unitarity_condition(const TypeDescriptor& resource, const TypeDescriptor& bath,
                                    const OccupationShift& shift, Count exact_limit = kDefaultExactLimit);

/// Frequency form: counts are n fRho and ell fGamma rounded by largest remainder.
UnitarityResult unitarity_condition(const FrequencyVector& f_rho, const FrequencyVector& f_gamma,
                                    const OccupationShift& shift, Count n, Count ell,
                                    Count exact_limit = kDefaultExactLimit);

/// Large-ell limit: -x . ln fGamma <= D(fRho || fGamma).
bool asymptotic_condition(const FrequencyVector& f_rho, const FrequencyVector& f_gamma, const std::vector<double>& x);
double asymptotic_margin(const FrequencyVector& f_rho, const FrequencyVector& f_gamma, const std::vector<double>& x);

/// Counts summing to n, floor(n f) plus largest remainders (ties to the lower level).
TypeDescriptor round_to_type(Count n, const FrequencyVector& f);

struct WorkLedger {
    Count n = 0;
    Count ell = 0;
    double extracted = 0.0;  // energy units, total over n copies
    double per_copy = 0.0;
    double limit_per_copy = 0.0;  // D(fRho || gamma) / beta
    std::vector<Count> per_level_delta;
    double feasibility_margin = 0.0;  // nats, of the binding type
    double asymptotic_margin = 0.0;   // D - beta H . x for the reported shift
    TypeDescriptor worst_resource;
    TypeDescriptor worst_bath;
    std::size_t candidates = 0;
    bool exact = false;           // every search box certified its optimum
    bool partial_search = false;  // a box optimum touched the boundary or hill climbing was used
};

/// Largest work W that every candidate typical composite type can deliver.
/// ell = 0 selects ceil((D n)^{3/2}) with D = D(fRho || gamma).
WorkLedger max_work(const FrequencyVector& f_rho, const Hamiltonian& h, double beta, Count n, Count ell = 0,
                    double width = kDefaultWidth);

/// Minimal-energy output counts over total systems with ln M(out) >= min_log_count.
struct MinEnergyResult {
    std::vector<Count> counts;
    double energy = 0.0;
    double log_count = 0.0;
    bool certified = false;
};
MinEnergyResult min_energy_counts(const Hamiltonian& h, Count total, double min_log_count);

}  // namespace athermal
