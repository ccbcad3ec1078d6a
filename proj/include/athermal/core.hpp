#pragma once

// States, Hamiltonians, Gibbs states and the entropic monotones of the
// athermality resource theory. All quantities are in nats with k_B = 1.

#include <complex>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace athermal {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kStateTolerance = 1e-12;

class Hamiltonian {
public:
    explicit Hamiltonian(std::vector<double> energies);

    /// Qubit with levels (0, gap).
    static Hamiltonian two_level(double gap = 1.0);

    std::size_t dimension() const noexcept { return energies_.size(); }
    const std::vector<double>& energies() const noexcept { return energies_; }
    double energy(std::size_t level) const { return energies_.at(level); }
    double max_energy() const;
    double min_energy() const;
    std::size_t max_level() const;
    Matrix matrix() const;

private:
    std::vector<double> energies_;
};

/// Probability vector over the energy levels of a diagonal Hamiltonian.
class QuasiclassicalState {
public:
    explicit QuasiclassicalState(std::vector<double> probs);

    std::size_t dimension() const noexcept { return probs_.size(); }
    const std::vector<double>& probs() const noexcept { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

class DensityMatrix {
public:
    /// Validates Hermiticity, positivity and unit trace to kStateTolerance.
    explicit DensityMatrix(Matrix entries);

    static DensityMatrix diagonal(std::span<const double> probs);
    static DensityMatrix diagonal(const QuasiclassicalState& state) { return diagonal(state.probs()); }
    static DensityMatrix pure(const Vector& amplitudes);
    /// |level><level| in a d-dimensional space.
    static DensityMatrix basis_state(std::size_t d, std::size_t level);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    /// Ascending eigenvalues, values in [-tol, 0) clamped to zero.
    Eigen::VectorXd eigenvalues() const;
    bool is_diagonal(double tol = 0.0) const;

private:
    Matrix m_;
};

struct GibbsState {
    double beta = 0.0;
    Hamiltonian hamiltonian{std::vector<double>{0.0, 1.0}};
    QuasiclassicalState probs{std::vector<double>{0.5, 0.5}};
    double partition_function = 2.0;
    double log_partition_function = 0.0;

    DensityMatrix density() const { return DensityMatrix::diagonal(probs); }
};

/// Boltzmann weights exp(-beta E_i)/Z. beta = 0 gives the uniform state,
/// beta = +inf the (uniform mixture over the) ground space.
GibbsState gibbs_state(const Hamiltonian& h, double beta);

/// q = e^{-beta E0} / (1 + e^{-beta E0}), excited population of a two-level Gibbs state.
double two_level_excitation(double beta, double gap = 1.0);

double binary_entropy(double p);
double shannon_entropy(std::span<const double> probs);
double von_neumann_entropy(const DensityMatrix& rho);

/// Classical relative entropy D(p||q); +inf when supp(p) is not inside supp(q).
double classical_relative_entropy(std::span<const double> p, std::span<const double> q);

/// D(rho||sigma) = Tr rho (ln rho - ln sigma). +inf when supp(rho) is not
/// inside supp(sigma).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

double mean_energy(const DensityMatrix& rho, const Hamiltonian& h);

/// F = <H> - S/beta.
double free_energy(const DensityMatrix& rho, const Hamiltonian& h, double beta);

/// Asymptotic rate D(rho||gamma) / D(sigma||gamma). Throws FreeTarget when sigma = gamma.
double interconversion_rate(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const GibbsState& gamma);

/// D(gamma||rho). A monotone, but not asymptotically continuous.
double reversed_monotone(const DensityMatrix& rho, const GibbsState& gamma);

struct ContinuityReport {
    bool holds = false;
    double lhs = 0.0;         // |f(rho1) - f(rho2)|
    double trace_norm = 0.0;  // ||rho1 - rho2||_1
    double log_d = 0.0;
    double rhs = 0.0;         // M ||rho1 - rho2||_1 ln d + 4c
    double m = 0.0;
    double c = 0.0;
};

/// Asymptotic-continuity inequality for f = D(.||gamma).
ContinuityReport continuity_bound_check(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                        const GibbsState& gamma, double m, double c);

/// M = beta K + 1 with K = E_max / ln d, so that D(rho||gamma) <= M ln d
/// for nonnegative energies.
double subextensivity_constant(const Hamiltonian& h, double beta);

/// Affinity constant c = ln 2 (the binary entropy bound, in nats).
inline constexpr double kAffinityConstant = 0.69314718055994530942;

double trace_norm(const Matrix& a);
/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

Matrix kron(const Matrix& a, const Matrix& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
Hamiltonian tensor(const Hamiltonian& a, const Hamiltonian& b);
DensityMatrix mix(double p, const DensityMatrix& a, const DensityMatrix& b);

/// Ginibre-distributed full-rank state (rank = d unless rank > 0 is given).
DensityMatrix random_density_matrix(std::size_t d, std::mt19937_64& rng, std::size_t rank = 0);
/// Energies uniform in [0, max_energy], one level pinned at 0.
Hamiltonian random_hamiltonian(std::size_t d, std::mt19937_64& rng, double max_energy);

}  // namespace athermal
