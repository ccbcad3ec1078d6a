#include "athermal/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "athermal/error.hpp"
#include "athermal/strings.hpp"

namespace athermal {

namespace {

constexpr Count kExactPureLimit = 10;
constexpr Count kExactMixtureLimit = 8;

// Distribution of the number of ones in Psi: k draws with P(1) = |b|^2 and
// n - k draws with P(1) = |a|^2.
std::vector<double> energy_distribution(Count n, Count k, double pb, double pa) {
    std::vector<double> dist(static_cast<std::size_t>(n) + 1, 0.0);
    dist[0] = 1.0;
    Count len = 0;
    auto add = [&](double one) {
        for (Count j = len + 1; j >= 1; --j)
            dist[static_cast<std::size_t>(j)] =
                dist[static_cast<std::size_t>(j)] * (1.0 - one) + dist[static_cast<std::size_t>(j - 1)] * one;
        dist[0] *= 1.0 - one;
        ++len;
    };
    for (Count i = 0; i < k; ++i) add(pb);
    for (Count i = k; i < n; ++i) add(pa);
    return dist;
}

Count ceil_count(double x) { return static_cast<Count>(std::ceil(x - 1e-12)); }
Count floor_count(double x) { return static_cast<Count>(std::floor(x + 1e-12)); }

// <x|phi_bit> for the two target vectors.
Complex phi_amplitude(const CoherentTarget& t, bool second, bool one) {
    if (!second) return one ? t.b : t.a;
    return one ? -std::conj(t.a) : std::conj(t.b);
}

}  // namespace

Vector ReferenceFrame::state() const {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dimension()));
    const double amp = 1.0 / std::sqrt(static_cast<double>(window_size));
    for (Count h = 0; h < window_size; ++h) v(static_cast<Eigen::Index>(padding + h)) = amp;
    return v;
}

ReferenceFrame frame_for_copies(Count n, double mean_energy) {
    require(n >= 1, ErrorCode::InvalidParameter, "n must be at least 1");
    const Count half = static_cast<Count>(std::ceil(std::cbrt(static_cast<double>(n) * static_cast<double>(n)) - 1e-12));
    ReferenceFrame f;
    f.window_size = 2 * half + 1;
    f.window_start = 0;
    f.padding = n;
    f.pad_energy = static_cast<Count>(std::llround(mean_energy)) - half;
    return f;
}

double shift_overlap(Count window_size, Count delta) {
    require(window_size >= 1, ErrorCode::InvalidParameter, "window size must be positive");
    require(delta >= 0, ErrorCode::InvalidParameter, "shift must be non-negative");
    if (delta >= window_size) return 0.0;
    return 1.0 - static_cast<double>(delta) / static_cast<double>(window_size);
}

double err_norm(Count shift, Count window_size) {
    require(window_size >= 1, ErrorCode::InvalidParameter, "window size must be positive");
    shift = std::abs(shift);
    return std::sqrt(2.0 * static_cast<double>(std::min(shift, window_size)) / static_cast<double>(window_size));
}

ConditionalShift build_conditional_shift(const Matrix& u, const std::vector<Count>& energies,
                                         const ReferenceFrame& frame) {
    const auto d = static_cast<std::size_t>(u.rows());
    require(u.rows() == u.cols() && energies.size() == d && d > 0, ErrorCode::InvalidParameter,
            "system unitary must be square and match the energy list");
    require(frame.window_size >= 1 && frame.padding >= 0, ErrorCode::InvalidFrame, "malformed frame");
    Count gap = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != Complex{0.0, 0.0})
                gap = std::max(gap, std::abs(energies[i] - energies[j]));
    require(gap <= frame.window_size - 1 && gap <= frame.padding, ErrorCode::InvalidFrame,
            "frame window does not span every energy gap of the unitary");

    ConditionalShift out;
    out.system_dim = d;
    out.frame_dim = frame.dimension();
    const auto fd = static_cast<Count>(out.frame_dim);
    const Count lo = frame.ladder_lo();
    const Count hi = frame.ladder_hi();
    const Count emin = *std::min_element(energies.begin(), energies.end());
    const Count emax = *std::max_element(energies.begin(), energies.end());
    const std::size_t dim = d * out.frame_dim;
    out.total_energy.resize(dim);
    for (std::size_t i = 0; i < d; ++i)
        for (Count f = 0; f < fd; ++f)
            out.total_energy[i * out.frame_dim + static_cast<std::size_t>(f)] = energies[i] + lo + f;

    std::vector<Eigen::Triplet<Complex>> entries;
    for (std::size_t j = 0; j < d; ++j) {
        for (Count f = 0; f < fd; ++f) {
            const std::size_t col = j * out.frame_dim + static_cast<std::size_t>(f);
            const Count total = out.total_energy[col];
            const bool complete = total - emax >= lo && total - emin <= hi;
            if (!complete) {
                entries.emplace_back(col, col, Complex{1.0, 0.0});
                continue;
            }
            for (std::size_t i = 0; i < d; ++i) {
                const Complex v = u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (v == Complex{0.0, 0.0}) continue;
                const Count level = total - energies[i] - lo;
                entries.emplace_back(i * out.frame_dim + static_cast<std::size_t>(level), col, v);
            }
        }
    }
    out.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    out.matrix.setFromTriplets(entries.begin(), entries.end());
    out.matrix.makeCompressed();

    out.commutes = true;
    for (Eigen::Index c = 0; c < out.matrix.outerSize(); ++c)
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(out.matrix, c); it; ++it)
            if (out.total_energy[static_cast<std::size_t>(it.row())] != out.total_energy[static_cast<std::size_t>(it.col())])
                out.commutes = false;

    const Eigen::SparseMatrix<Complex> gram = out.matrix.adjoint() * out.matrix;
    Eigen::SparseMatrix<Complex> id(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    id.setIdentity();
    const Eigen::SparseMatrix<Complex> diff = gram - id;
    for (Eigen::Index c = 0; c < diff.outerSize(); ++c)
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(diff, c); it; ++it)
            out.unitarity_error = std::max(out.unitarity_error, std::abs(it.value()));
    return out;
}

CoherentTarget::CoherentTarget(Complex a_, Complex b_, double p_, Count n_) : a(a_), b(b_), p(p_), n(n_) {
    require(std::abs(std::norm(a) + std::norm(b) - 1.0) <= kStateTolerance, ErrorCode::InvalidParameter,
            "|a|^2 + |b|^2 must equal 1");
    require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter, "p must lie in [0, 1]");
    require(n >= 1, ErrorCode::InvalidParameter, "n must be at least 1");
}

DensityMatrix CoherentTarget::state() const {
    Vector v1(2), v2(2);
    v1 << a, b;
    v2 << std::conj(b), -std::conj(a);
    Matrix m = p * (v1 * v1.adjoint()) + (1.0 - p) * (v2 * v2.adjoint());
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

CoherentReport coherent_formation_error(const CoherentTarget& target, bool exact) {
    const Count n = target.n;
    const double pb = std::norm(target.b);
    const double pa = std::norm(target.a);
    const double root = std::sqrt(static_cast<double>(n));
    const ReferenceFrame frame = frame_for_copies(n);

    CoherentReport rep;
    rep.n = n;
    rep.window_size = frame.window_size;
    rep.typical_k_lo = std::max<Count>(0, ceil_count(static_cast<double>(n) * target.p - root));
    rep.typical_k_hi = std::min<Count>(n, floor_count(static_cast<double>(n) * target.p + root));

    // Eigenstates requested per energy shell, for the degeneracy check.
    std::map<Count, BigCount> demand;
    double typical_mass = 0.0;
    for (Count k = rep.typical_k_lo; k <= rep.typical_k_hi; ++k) {
        const double weight =
            std::exp(log_type_probability(TypeDescriptor::binary(n, k), FrequencyVector::binary(target.p)));
        if (!(weight > 0.0)) continue;
        typical_mass += weight;
        CoherentTerm term;
        term.k = k;
        term.probability = weight;
        term.mean_energy = static_cast<double>(k) * pb + static_cast<double>(n - k) * pa;
        term.target_energy = static_cast<Count>(std::llround(term.mean_energy));
        term.typical_lo = std::max<Count>(0, ceil_count(term.mean_energy - root));
        term.typical_hi = std::min<Count>(n, floor_count(term.mean_energy + root));
        const auto dist = energy_distribution(n, k, pb, pa);
        double inside = 0.0;
        double nu2 = 0.0;
        Count worst_shift = 0;
        for (Count e = term.typical_lo; e <= term.typical_hi; ++e) {
            const double w = dist[static_cast<std::size_t>(e)];
            const double err = err_norm(term.target_energy - e, frame.window_size);
            inside += w;
            nu2 += w * err * err;
            worst_shift = std::max(worst_shift, std::abs(term.target_energy - e));
        }
        term.tail = std::clamp(1.0 - inside, 0.0, 1.0);
        term.max_err_norm = err_norm(worst_shift, frame.window_size);
        term.nu1_residual = std::sqrt(term.tail);
        term.nu2_norm = std::sqrt(nu2);
        term.nu3_norm = std::sqrt(term.tail);
        rep.worst_tail = std::max(rep.worst_tail, term.tail);
        rep.worst_err_norm = std::max(rep.worst_err_norm, term.max_err_norm);
        rep.vector_bound = std::max(rep.vector_bound, 2.0 * std::sqrt(term.tail) + term.max_err_norm);
        auto [it, fresh] = demand.try_emplace(term.target_energy, BigCount(0));
        it->second = it->second + binomial(n, k);
        require(it->second <= binomial(n, term.target_energy), ErrorCode::InvalidTarget,
                "energy shell " + std::to_string(term.target_energy) + " lacks the degeneracy for the target");
        rep.terms.push_back(term);
    }
    rep.atypical_mass = std::clamp(1.0 - typical_mass, 0.0, 1.0);
    rep.analytic_bound = rep.atypical_mass + std::sqrt(2.0) * rep.vector_bound;
    if (!exact) return rep;

    const bool pure = target.p == 1.0 || target.p == 0.0;
    require(n <= (pure ? kExactPureLimit : kExactMixtureLimit), ErrorCode::UnsupportedSize,
            "exact coherent simulation is limited to n <= 10 (pure) or n <= 8 (mixed)");
    rep.exact = true;

    const std::size_t strings = std::size_t{1} << n;
    const std::size_t fd = frame.dimension();
    const Vector h_state = frame.state();
    // Frame vector shifted by s levels.
    auto shifted = [&](Count s) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(fd));
        for (Count h = 0; h < frame.window_size; ++h)
            v(static_cast<Eigen::Index>(frame.padding + h + s)) = h_state(static_cast<Eigen::Index>(frame.padding + h));
        return v;
    };

    struct Column {
        Vector amplitudes;  // Psi_g over strings
        Count target_energy = 0;
        double weight = 0.0;
        bool typical = false;
    };
    std::vector<Column> cols;
    std::map<Count, const CoherentTerm*> by_k;
    for (const auto& t : rep.terms) by_k[t.k] = &t;
    for (Bits g = 0; g < strings; ++g) {
        const Count k = n - popcount(g);  // set bits select phi2
        const double weight = std::pow(target.p, static_cast<double>(k)) *
                              std::pow(1.0 - target.p, static_cast<double>(n - k));
        if (!(weight > 0.0)) continue;
        Column c;
        c.weight = weight;
        const auto found = by_k.find(k);
        c.typical = found != by_k.end();
        c.target_energy = c.typical ? found->second->target_energy : 0;
        c.amplitudes.resize(static_cast<Eigen::Index>(strings));
        for (Bits x = 0; x < strings; ++x) {
            Complex amp{1.0, 0.0};
            for (Count i = 0; i < n; ++i)
                amp *= phi_amplitude(target, (g >> i) & 1U, (x >> i) & 1U);
            c.amplitudes(static_cast<Eigen::Index>(x)) = amp;
        }
        cols.push_back(std::move(c));
    }

    // Joint vectors U(|t,s> (x) |H>) and Psi (x) |H>, string-major.
    auto protocol_vector = [&](const Column& c) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(strings * fd));
        for (Bits x = 0; x < strings; ++x) {
            const Vector frame_part = shifted(c.target_energy - popcount(x));
            v.segment(static_cast<Eigen::Index>(x * fd), static_cast<Eigen::Index>(fd)) =
                c.amplitudes(static_cast<Eigen::Index>(x)) * frame_part;
        }
        return v;
    };
    auto ideal_vector = [&](const Column& c) {
        Vector v(static_cast<Eigen::Index>(strings * fd));
        for (Bits x = 0; x < strings; ++x)
            v.segment(static_cast<Eigen::Index>(x * fd), static_cast<Eigen::Index>(fd)) =
                c.amplitudes(static_cast<Eigen::Index>(x)) * h_state;
        return v;
    };

    std::vector<Vector> protocol, ideal;
    std::vector<double> pw, iw;
    double fidelity = 0.0;
    double max_dist = 0.0;
    for (const auto& c : cols) {
        const Vector w = ideal_vector(c);
        ideal.push_back(w);
        iw.push_back(c.weight);
        if (!c.typical) continue;
        const Vector v = protocol_vector(c);
        max_dist = std::max(max_dist, (v - w).norm());
        for (Bits x = 0; x < strings; ++x) {
            const Complex overlap =
                h_state.dot(v.segment(static_cast<Eigen::Index>(x * fd), static_cast<Eigen::Index>(fd)));
            fidelity += c.weight * std::norm(overlap);
        }
        protocol.push_back(v);
        pw.push_back(c.weight);
    }
    rep.max_vector_distance = max_dist;
    rep.catalyst_fidelity = typical_mass > 0.0 ? fidelity / typical_mass : 0.0;

    if (protocol.size() == 1 && ideal.size() == 1) {
        // sqrt(1 - |<v|w>|^2) as the norm of the part of w orthogonal to v; no cancellation near 1.
        const Vector& v = protocol[0];
        const Vector& w = ideal[0];
        rep.trace_distance = (w - v * (v.dot(w) / v.squaredNorm())).norm() / w.norm();
        return rep;
    }
    // Trace norm of sum_i s_i w_i |x_i><x_i| through the Gram matrix of the vectors.
    std::vector<const Vector*> all;
    std::vector<double> signs;
    for (std::size_t i = 0; i < protocol.size(); ++i) {
        all.push_back(&protocol[i]);
        signs.push_back(pw[i]);
    }
    for (std::size_t i = 0; i < ideal.size(); ++i) {
        all.push_back(&ideal[i]);
        signs.push_back(-iw[i]);
    }
    const auto dim = static_cast<Eigen::Index>(all.size());
    Matrix gram(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = i; j < dim; ++j) {
            const Complex v = all[static_cast<std::size_t>(i)]->dot(*all[static_cast<std::size_t>(j)]);
            gram(i, j) = v;
            gram(j, i) = std::conj(v);
        }
    Eigen::SelfAdjointEigenSolver<Matrix> ges(gram);
    const Eigen::VectorXd gvals = ges.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix root_gram = ges.eigenvectors() * gvals.asDiagonal() * ges.eigenvectors().adjoint();
    Eigen::VectorXd s(dim);
    for (Eigen::Index i = 0; i < dim; ++i) s(i) = signs[static_cast<std::size_t>(i)];
    Matrix mid = root_gram * s.asDiagonal() * root_gram;
    mid = 0.5 * (mid + mid.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> mes(mid, Eigen::EigenvaluesOnly);
    rep.trace_distance = 0.5 * mes.eigenvalues().cwiseAbs().sum();
    return rep;
}

}  // namespace athermal
