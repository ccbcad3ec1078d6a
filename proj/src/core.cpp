#include "athermal/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "athermal/error.hpp"

namespace athermal {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

bool is_hermitian(const Matrix& m, double tol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

void clamp_small_negatives(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v(i) < 0.0 && v(i) >= -kStateTolerance) v(i) = 0.0;
}

std::vector<double> diagonal_of(const DensityMatrix& rho) {
    std::vector<double> d(rho.dimension());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::max(0.0, rho(i, i).real());
    return d;
}

void require_same_dimension(const DensityMatrix& a, const DensityMatrix& b) {
    require(a.dimension() == b.dimension(), ErrorCode::InvalidParameter,
            "dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                std::to_string(b.dimension()));
}

}  // namespace

Hamiltonian::Hamiltonian(std::vector<double> energies) : energies_(std::move(energies)) {
    require(energies_.size() >= 2, ErrorCode::InvalidParameter,
            "a Hamiltonian needs at least two levels");
    for (double e : energies_)
        require(std::isfinite(e), ErrorCode::InvalidParameter, "energies must be finite");
}

Hamiltonian Hamiltonian::two_level(double gap) {
    require(gap > 0.0 && std::isfinite(gap), ErrorCode::InvalidParameter,
            "two-level gap must be positive");
    return Hamiltonian({0.0, gap});
}

double Hamiltonian::max_energy() const { return *std::max_element(energies_.begin(), energies_.end()); }
double Hamiltonian::min_energy() const { return *std::min_element(energies_.begin(), energies_.end()); }

std::size_t Hamiltonian::max_level() const {
    return static_cast<std::size_t>(std::max_element(energies_.begin(), energies_.end()) - energies_.begin());
}

Matrix Hamiltonian::matrix() const {
    Matrix m = Matrix::Zero(dimension(), dimension());
    for (std::size_t i = 0; i < dimension(); ++i) m(i, i) = energies_[i];
    return m;
}

QuasiclassicalState::QuasiclassicalState(std::vector<double> probs) : probs_(std::move(probs)) {
    require(!probs_.empty(), ErrorCode::InvalidParameter, "empty probability vector");
    double total = 0.0;
    for (double p : probs_) {
        require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter,
                "probabilities must lie in [0,1]");
        total += p;
    }
    require(std::abs(total - 1.0) <= kStateTolerance, ErrorCode::InvalidParameter,
            "probabilities must sum to 1");
}

DensityMatrix::DensityMatrix(Matrix entries) : m_(std::move(entries)) {
    require(m_.rows() == m_.cols() && m_.rows() >= 1, ErrorCode::InvalidParameter,
            "density matrix must be square and nonempty");
    require(m_.allFinite(), ErrorCode::InvalidParameter, "density matrix has non-finite entries");
    require(is_hermitian(m_, kStateTolerance), ErrorCode::InvalidParameter,
            "density matrix is not Hermitian");
    require(std::abs(m_.trace() - Complex(1.0, 0.0)) <= kStateTolerance, ErrorCode::InvalidParameter,
            "density matrix trace differs from 1");
    require(hermitian_eigenvalues(m_).minCoeff() >= -kStateTolerance, ErrorCode::InvalidParameter,
            "density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probs) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(probs.size()), static_cast<Eigen::Index>(probs.size()));
    for (std::size_t i = 0; i < probs.size(); ++i) m(i, i) = probs[i];
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const Vector& amplitudes) {
    const double norm = amplitudes.norm();
    require(std::abs(norm - 1.0) <= 1e-12, ErrorCode::InvalidParameter, "state vector is not normalized");
    return DensityMatrix(amplitudes * amplitudes.adjoint());
}

DensityMatrix DensityMatrix::basis_state(std::size_t d, std::size_t level) {
    require(level < d, ErrorCode::InvalidParameter, "basis level out of range");
    Matrix m = Matrix::Zero(d, d);
    m(level, level) = 1.0;
    return DensityMatrix(std::move(m));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
    Eigen::VectorXd v = hermitian_eigenvalues(m_);
    clamp_small_negatives(v);
    return v;
}

bool DensityMatrix::is_diagonal(double tol) const {
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
        for (Eigen::Index j = 0; j < m_.cols(); ++j)
            if (i != j && std::abs(m_(i, j)) > tol) return false;
    return true;
}

GibbsState gibbs_state(const Hamiltonian& h, double beta) {
    require(!std::isnan(beta) && beta >= 0.0 && (std::isfinite(beta) || beta == kInfinity),
            ErrorCode::InvalidParameter, "beta must be finite and nonnegative, or +inf");
    const auto& e = h.energies();
    const double e0 = h.min_energy();
    std::vector<double> w(e.size());
    if (beta == kInfinity) {
        for (std::size_t i = 0; i < e.size(); ++i) w[i] = e[i] == e0 ? 1.0 : 0.0;
    } else {
        for (std::size_t i = 0; i < e.size(); ++i) w[i] = std::exp(-beta * (e[i] - e0));
    }
    const double shifted_z = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= shifted_z;

    GibbsState g;
    g.beta = beta;
    g.hamiltonian = h;
    g.probs = QuasiclassicalState(std::move(w));
    if (beta == kInfinity) {
        g.log_partition_function = e0 == 0.0 ? std::log(shifted_z) : (e0 > 0.0 ? -kInfinity : kInfinity);
    } else {
        g.log_partition_function = std::log(shifted_z) - beta * e0;
    }
    g.partition_function = std::exp(g.log_partition_function);
    return g;
}

double two_level_excitation(double beta, double gap) {
    require(beta >= 0.0 && gap > 0.0, ErrorCode::InvalidParameter, "beta >= 0 and gap > 0 required");
    if (beta == kInfinity) return 0.0;
    const double w = std::exp(-beta * gap);
    return w / (1.0 + w);
}

double binary_entropy(double p) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter, "binary entropy needs p in [0,1]");
    return -xlogx(p) - xlogx(1.0 - p);
}

double shannon_entropy(std::span<const double> probs) {
    double s = 0.0;
    for (double p : probs) s -= xlogx(p);
    return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    if (rho.is_diagonal()) return shannon_entropy(diagonal_of(rho));
    const Eigen::VectorXd ev = rho.eigenvalues();
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) s -= xlogx(ev(i));
    return s;
}

double classical_relative_entropy(std::span<const double> p, std::span<const double> q) {
    require(p.size() == q.size(), ErrorCode::InvalidParameter, "dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInfinity;
        d += p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return std::max(0.0, d);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dimension(rho, sigma);
    const std::size_t d = rho.dimension();
    if (sigma.is_diagonal()) {
        const auto s = diagonal_of(sigma);
        if (rho.is_diagonal()) return classical_relative_entropy(diagonal_of(rho), s);
        double cross = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double w = rho(j, j).real();
            if (w <= kStateTolerance) continue;
            if (s[j] <= 0.0) return kInfinity;
            cross -= w * std::log(s[j]);
        }
        return std::max(0.0, cross - von_neumann_entropy(rho));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma.matrix());
    Eigen::VectorXd mu = solver.eigenvalues();
    clamp_small_negatives(mu);
    const Matrix& v = solver.eigenvectors();
    double cross = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double w = (v.col(j).adjoint() * rho.matrix() * v.col(j))(0, 0).real();
        if (w <= kStateTolerance) continue;
        if (mu(j) <= kStateTolerance) return kInfinity;
        cross -= w * std::log(mu(j));
    }
    return std::max(0.0, cross - von_neumann_entropy(rho));
}

double mean_energy(const DensityMatrix& rho, const Hamiltonian& h) {
    require(rho.dimension() == h.dimension(), ErrorCode::InvalidParameter, "dimension mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < h.dimension(); ++i) e += rho(i, i).real() * h.energy(i);
    return e;
}

double free_energy(const DensityMatrix& rho, const Hamiltonian& h, double beta) {
    require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidParameter, "beta must be positive");
    return mean_energy(rho, h) - von_neumann_entropy(rho) / beta;
}

double interconversion_rate(const DensityMatrix& rho, const DensityMatrix& sigma, const GibbsState& gamma) {
    const DensityMatrix g = gamma.density();
    const double den = relative_entropy(sigma, g);
    require(den > 0.0, ErrorCode::FreeTarget, "target equals the Gibbs state");
    const double num = relative_entropy(rho, g);
    if (num == 0.0) return 0.0;
    if (std::isinf(den)) return std::isinf(num) ? std::nan("") : 0.0;
    return num / den;
}

double reversed_monotone(const DensityMatrix& rho, const GibbsState& gamma) {
    return relative_entropy(gamma.density(), rho);
}

double subextensivity_constant(const Hamiltonian& h, double beta) {
    const double k = (h.max_energy() - h.min_energy()) / std::log(static_cast<double>(h.dimension()));
    return beta * k + 1.0;
}

ContinuityReport continuity_bound_check(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                        const GibbsState& gamma, double m, double c) {
    require_same_dimension(rho1, rho2);
    const DensityMatrix g = gamma.density();
    ContinuityReport r;
    r.m = m;
    r.c = c;
    r.lhs = std::abs(relative_entropy(rho1, g) - relative_entropy(rho2, g));
    r.trace_norm = trace_norm(rho1.matrix() - rho2.matrix());
    r.log_d = std::log(static_cast<double>(rho1.dimension()));
    r.rhs = m * r.trace_norm * r.log_d + 4.0 * c;
    r.holds = r.lhs <= r.rhs;
    return r;
}

double trace_norm(const Matrix& a) {
    if (a.rows() == a.cols() && is_hermitian(a, 1e-13 * std::max(1.0, a.cwiseAbs().maxCoeff())))
        return hermitian_eigenvalues(0.5 * (a + a.adjoint())).cwiseAbs().sum();
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    require_same_dimension(a, b);
    return 0.5 * trace_norm(a.matrix() - b.matrix());
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.matrix(), b.matrix()));
}

Hamiltonian tensor(const Hamiltonian& a, const Hamiltonian& b) {
    std::vector<double> e;
    e.reserve(a.dimension() * b.dimension());
    for (double x : a.energies())
        for (double y : b.energies()) e.push_back(x + y);
    return Hamiltonian(std::move(e));
}

DensityMatrix mix(double p, const DensityMatrix& a, const DensityMatrix& b) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter, "mixing weight outside [0,1]");
    require_same_dimension(a, b);
    return DensityMatrix(p * a.matrix() + (1.0 - p) * b.matrix());
}

DensityMatrix random_density_matrix(std::size_t d, std::mt19937_64& rng, std::size_t rank) {
    require(d >= 1, ErrorCode::InvalidParameter, "dimension must be positive");
    if (rank == 0 || rank > d) rank = d;
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(d, rank);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(normal(rng), normal(rng));
    Matrix rho = g * g.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) rho(i, i) = rho(i, i).real();
    return DensityMatrix(std::move(rho));
}

Hamiltonian random_hamiltonian(std::size_t d, std::mt19937_64& rng, double max_energy) {
    require(d >= 2 && max_energy > 0.0, ErrorCode::InvalidParameter, "need d >= 2 and positive energy scale");
    std::uniform_real_distribution<double> u(0.0, max_energy);
    std::vector<double> e(d);
    e[0] = 0.0;
    for (std::size_t i = 1; i < d; ++i) e[i] = u(rng);
    return Hamiltonian(std::move(e));
}

}  // namespace athermal
