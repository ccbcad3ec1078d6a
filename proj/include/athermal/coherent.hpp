#pragma once

// Coherent formation with a reference frame for energy: a uniform
// superposition over a window of frame energy levels absorbs the energy
// changes of a system unitary, so the joint operation conserves energy.

#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "athermal/core.hpp"
#include "athermal/typeclass.hpp"

namespace athermal {

/// Uniform superposition over integer energies window_start .. window_start + window_size - 1.
/// The frame Hilbert space is the ladder extended by `padding` levels on both sides.
struct ReferenceFrame {
    Count window_size = 1;
    Count window_start = 0;
    Count padding = 0;     // largest system energy change the frame can absorb
    Count pad_energy = 0;  // energy of the fixed padding eigenstate tensored onto every level

    Count ladder_lo() const noexcept { return window_start - padding; }
    Count ladder_hi() const noexcept { return window_start + window_size - 1 + padding; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(ladder_hi() - ladder_lo() + 1); }
    /// Frame state over the ladder basis.
    Vector state() const;
};

/// Window size 2 ceil(n^{2/3}) + 1 starting at 0, padded by n levels.
ReferenceFrame frame_for_copies(Count n, double mean_energy = 0.0);

/// <H| shifted-by-delta |H> = 1 - delta / N, zero once the windows are disjoint.
double shift_overlap(Count window_size, Count delta);

/// || shifted |H> - |H> || = sqrt(2 min(shift, N) / N).
double err_norm(Count shift, Count window_size);

struct ConditionalShift {
    Eigen::SparseMatrix<Complex> matrix;  // joint basis index = system * frame_dim + frame level
    std::vector<Count> total_energy;      // per joint basis index
    std::size_t system_dim = 0;
    std::size_t frame_dim = 0;
    bool commutes = false;  // every nonzero entry joins equal total energies
    double unitarity_error = 0.0;  // max |(U^dag U - 1)_ij|
};

/// sum_ij u_ij |E_i><E_j| (x) |h - E_i + E_j><h| on every total-energy shell the
/// ladder covers completely; identity on the edge shells.
ConditionalShift build_conditional_shift(const Matrix& system_unitary, const std::vector<Count>& energies,
                                         const ReferenceFrame& frame);

/// rho = p |phi1><phi1| + (1 - p) |phi2><phi2|, phi1 = a|0> + b|1>, phi2 = b*|0> - a*|1>.
struct CoherentTarget {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
    double p = 1.0;
    Count n = 1;

    CoherentTarget() = default;
    CoherentTarget(Complex a_, Complex b_, double p_, Count n_);
    DensityMatrix state() const;
};

/// Contribution of all product strings with k copies of phi1.
struct CoherentTerm {
    Count k = 0;
    double probability = 0.0;  // total weight C(n, k) p^k (1 - p)^(n - k)
    double mean_energy = 0.0;  // k |b|^2 + (n - k) |a|^2
    Count target_energy = 0;   // rounded mean, the prepared eigenstate energy
    Count typical_lo = 0;      // energies within sqrt(n) of the mean
    Count typical_hi = 0;
    double tail = 0.0;             // energy mass outside the window
    double max_err_norm = 0.0;     // worst frame error inside the window
    double nu1_residual = 0.0;     // || nu1 - Psi (x) H ||
    double nu2_norm = 0.0;
    double nu3_norm = 0.0;
};

struct CoherentReport {
    Count n = 0;
    Count window_size = 0;
    Count typical_k_lo = 0;
    Count typical_k_hi = 0;
    double atypical_mass = 0.0;
    std::vector<CoherentTerm> terms;  // typical k with nonzero weight
    double worst_tail = 0.0;
    double worst_err_norm = 0.0;
    double vector_bound = 0.0;    // max over terms of 2 sqrt(tail) + max_err_norm
    double analytic_bound = 0.0;  // atypical_mass + sqrt(2) vector_bound, trace distance
    bool exact = false;
    std::optional<double> trace_distance;     // half trace norm
    std::optional<double> catalyst_fidelity;  // <H| frame after |H>
    std::optional<double> max_vector_distance;
};

/// Analytic decomposition; exact mode also simulates the protocol
/// (p = 1 up to n = 10, mixtures up to n = 8).
CoherentReport coherent_formation_error(const CoherentTarget& target, bool exact = false);

}  // namespace athermal
