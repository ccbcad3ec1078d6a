#include "athermal/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "athermal/error.hpp"

namespace athermal {

namespace {

constexpr int kEnumerationLimit = 14;
constexpr int kCountingLimit = 24;
constexpr int kCoherentResourceLimit = 10;

std::uint64_t pascal(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return c;
}

bool work_full(Bits s, int work_length) { return low_bits(s, work_length) == all_ones(work_length); }

double string_prob(Bits s, int length, double one) {
    const int ones = popcount(s);
    return std::pow(one, ones) * std::pow(1.0 - one, length - ones);
}

mpq_class rational_pow(const mpq_class& x, int k) {
    mpq_class r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

Count oracle_max_m(Count ell, Count gibbs_ones, Count n, Count resource_ones) {
    require(ell >= 0 && n >= 0 && gibbs_ones >= 0 && gibbs_ones <= ell && resource_ones >= 0 && resource_ones <= n,
            ErrorCode::InvalidParameter, "ones counts must lie within the register sizes");
    require(ell + n <= kCountingLimit, ErrorCode::UnsupportedSize, "oracle needs ell + n <= 24");
    const int len = static_cast<int>(ell + n);
    const int weight = static_cast<int>(gibbs_ones + resource_ones);
    if (len > kEnumerationLimit) {
        const std::uint64_t inputs = pascal(static_cast<int>(ell), static_cast<int>(gibbs_ones)) *
                                     pascal(static_cast<int>(n), static_cast<int>(resource_ones));
        for (int m = weight; m > 0; --m)
            if (inputs <= pascal(len - m, weight - m)) return m;
        return 0;
    }
    std::vector<Bits> inputs;
    for (Bits b : enumerate_fixed_weight(static_cast<int>(ell), static_cast<int>(gibbs_ones)))
        for (Bits r : enumerate_fixed_weight(static_cast<int>(n), static_cast<int>(resource_ones)))
            inputs.push_back(concat(b, r, static_cast<int>(n)));
    for (int m = weight; m >= 0; --m) {
        std::vector<Bits> outputs;
        for (Bits head : enumerate_fixed_weight(len - m, weight - m)) outputs.push_back(concat(head, all_ones(m), m));
        if (outputs.size() < inputs.size()) continue;
        // Explicit injection: i-th input to i-th output, then verify it.
        std::vector<Bits> image(outputs.begin(), outputs.begin() + static_cast<std::ptrdiff_t>(inputs.size()));
        std::sort(image.begin(), image.end());
        const bool distinct = std::adjacent_find(image.begin(), image.end()) == image.end();
        const bool legal = std::all_of(image.begin(), image.end(),
                                       [&](Bits o) { return popcount(o) == weight && work_full(o, m); });
        if (distinct && legal) return m;
    }
    return 0;
}

double StringDistribution::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

mpq_class StringDistribution::exact_total() const {
    mpq_class s = 0;
    for (const auto& x : exact) s += x;
    return s;
}

StringDistribution StringDistribution::product(Count ell, double q, Count n, double p) {
    require(ell + n <= kCountingLimit, ErrorCode::UnsupportedSize, "string distributions need ell + n <= 24");
    require(q >= 0.0 && q <= 1.0 && p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter, "probabilities out of range");
    StringDistribution d;
    d.length = static_cast<int>(ell + n);
    const Bits count = Bits{1} << d.length;
    for (Bits s = 0; s < count; ++s) {
        const double w = string_prob(s >> n, static_cast<int>(ell), q) *
                         string_prob(low_bits(s, static_cast<int>(n)), static_cast<int>(n), p);
        if (w > 0.0) {
            d.strings.push_back(s);
            d.probs.push_back(w);
        }
    }
    return d;
}

StringDistribution StringDistribution::product(Count ell, const mpq_class& q, Count n, const mpq_class& p) {
    require(ell + n <= kCountingLimit, ErrorCode::UnsupportedSize, "string distributions need ell + n <= 24");
    require(q >= 0 && q <= 1 && p >= 0 && p <= 1, ErrorCode::InvalidParameter, "probabilities out of range");
    StringDistribution d;
    d.length = static_cast<int>(ell + n);
    const Bits count = Bits{1} << d.length;
    const mpq_class q0 = 1 - q;
    const mpq_class p0 = 1 - p;
    for (Bits s = 0; s < count; ++s) {
        const int gb = popcount(s >> n);
        const int rb = popcount(low_bits(s, static_cast<int>(n)));
        mpq_class w = rational_pow(q, gb) * rational_pow(q0, static_cast<int>(ell) - gb) * rational_pow(p, rb) *
                      rational_pow(p0, static_cast<int>(n) - rb);
        if (w > 0) {
            d.strings.push_back(s);
            d.probs.push_back(w.get_d());
            d.exact.push_back(std::move(w));
        }
    }
    return d;
}

PermutationMap PermutationMap::identity(int length) {
    require(length >= 0 && length <= kCountingLimit, ErrorCode::UnsupportedSize, "permutations need length <= 24");
    PermutationMap p;
    p.length = length;
    p.image.resize(std::size_t{1} << length);
    std::iota(p.image.begin(), p.image.end(), Bits{0});
    p.planned.assign(p.image.size(), true);
    return p;
}

bool PermutationMap::bijective() const {
    std::vector<bool> hit(image.size(), false);
    for (Bits o : image) {
        if (o >= image.size() || hit[o]) return false;
        hit[o] = true;
    }
    return true;
}

bool PermutationMap::preserves_weight() const {
    for (std::size_t s = 0; s < image.size(); ++s)
        if (popcount(static_cast<Bits>(s)) != popcount(image[s])) return false;
    return true;
}

PermutationMap distillation_permutation(const DistillationPlan& plan) {
    require(plan.ell + plan.n <= kCountingLimit, ErrorCode::UnsupportedSize, "permutations need ell + n <= 24");
    const int len = static_cast<int>(plan.ell + plan.n);
    const std::size_t size = std::size_t{1} << len;
    constexpr Bits kUnset = ~Bits{0};
    PermutationMap map;
    map.length = len;
    map.image.assign(size, kUnset);
    map.planned.assign(size, false);
    std::vector<bool> used(size, false);
    if (!plan.no_resource) {
        for (Count g = plan.bath_window.lo; g <= plan.bath_window.hi; ++g) {
            for (Count r = plan.resource_window.lo; r <= plan.resource_window.hi; ++r) {
                for (const auto& [in, out] : build_string_map(plan, g, r).pairs) {
                    require(!used[out], ErrorCode::Internal, "two inputs share an output string");
                    map.image[in] = out;
                    map.planned[in] = true;
                    used[out] = true;
                }
            }
        }
    }
    // Leftover inputs fill leftover outputs within each weight shell.
    std::vector<std::vector<Bits>> free_in(static_cast<std::size_t>(len) + 1), free_out(static_cast<std::size_t>(len) + 1);
    for (Bits s = 0; s < size; ++s) {
        const auto w = static_cast<std::size_t>(popcount(s));
        if (map.image[s] == kUnset) free_in[w].push_back(s);
        if (!used[s]) free_out[w].push_back(s);
    }
    for (std::size_t w = 0; w < free_in.size(); ++w) {
        require(free_in[w].size() == free_out[w].size(), ErrorCode::Internal, "shell sizes do not match");
        for (std::size_t i = 0; i < free_in[w].size(); ++i) map.image[free_in[w][i]] = free_out[w][i];
    }
    return map;
}

ClassicalExecution execute_permutation(const PermutationMap& map, const StringDistribution& input, int work_length) {
    require(input.length == map.length, ErrorCode::InvalidParameter, "distribution and permutation lengths differ");
    require(work_length >= 0 && work_length <= map.length, ErrorCode::InvalidParameter, "work register too long");
    ClassicalExecution run;
    run.input_length = input.length;
    run.work_length = work_length;
    run.output.length = map.length;
    std::vector<std::size_t> order(input.strings.size());
    std::vector<Bits> outs(input.strings.size());
    mpq_class success = 0;
    for (std::size_t i = 0; i < input.strings.size(); ++i) {
        const Bits in = input.strings[i];
        const Bits out = map.image[in];
        outs[i] = out;
        run.trajectories.push_back({in, out, input.probs[i]});
        run.ones_conserved = run.ones_conserved && popcount(in) == popcount(out);
        if (!map.planned[in]) run.uncovered_mass += input.probs[i];
        if (work_full(out, work_length)) {
            run.success_probability += input.probs[i];
            if (input.rational()) success += input.exact[i];
        }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return outs[a] < outs[b]; });
    for (std::size_t j = 0; j < order.size(); ++j) {
        const std::size_t i = order[j];
        if (j > 0 && outs[order[j - 1]] == outs[i]) run.injective = false;
        run.output.strings.push_back(outs[i]);
        run.output.probs.push_back(input.probs[i]);
        if (input.rational()) run.output.exact.push_back(input.exact[i]);
    }
    if (input.rational()) run.exact_success = success;
    return run;
}

ClassicalExecution execute_plan_classical(const DistillationPlan& plan, const StringDistribution& input) {
    return execute_permutation(distillation_permutation(plan), input, static_cast<int>(plan.m));
}

ClassicalExecution execute_plan_classical(const FormationPlan& plan, const StringDistribution& bath) {
    require(bath.length == plan.ell, ErrorCode::InvalidParameter, "bath distribution must cover ell symbols");
    require(plan.ell + plan.m <= kCountingLimit, ErrorCode::UnsupportedSize, "formation execution needs ell + m <= 24");
    const int work = static_cast<int>(plan.m);
    const int len = static_cast<int>(plan.ell + plan.m);
    const int n = static_cast<int>(plan.n);
    ClassicalExecution run;
    run.input_length = len;
    run.work_length = work;
    run.output.length = len;
    run.target_ones_distribution.assign(static_cast<std::size_t>(n) + 1, 0.0);

    const auto& weights = plan.birkhoff.achieved_weights;
    std::map<std::pair<Count, Count>, std::map<Bits, Bits>> maps;
    std::map<Bits, double> out_mass;
    std::map<Bits, mpq_class> out_exact;
    for (std::size_t i = 0; i < bath.strings.size(); ++i) {
        const Bits b = bath.strings[i];
        const Bits in = concat(b, all_ones(work), work);
        const Count g = popcount(b);
        if (!plan.bath_window.contains(g)) {
            run.uncovered_mass += bath.probs[i];
            run.trajectories.push_back({in, in, bath.probs[i]});
            out_mass[in] += bath.probs[i];
            if (bath.rational()) out_exact[in] += bath.exact[i];
            continue;
        }
        for (Count t = plan.target_window.lo; t <= plan.target_window.hi; ++t) {
            const double w = weights[static_cast<std::size_t>(t - plan.target_window.lo)];
            if (!(w > 0.0)) continue;
            auto [it, fresh] = maps.try_emplace({g, t});
            if (fresh)
                for (const auto& [src, dst] : build_formation_map(plan, g, t).pairs) it->second.emplace(src, dst);
            const Bits out = it->second.at(in);
            const double mass = bath.probs[i] * w;
            run.trajectories.push_back({in, out, mass});
            run.ones_conserved = run.ones_conserved && popcount(in) == popcount(out);
            out_mass[out] += mass;
            run.target_ones_distribution[static_cast<std::size_t>(popcount(out >> plan.k))] += mass;
            run.success_probability += mass;
        }
    }
    // Injectivity of every per-pair map.
    for (const auto& [key, m] : maps) {
        std::vector<Bits> images;
        for (const auto& [src, dst] : m) images.push_back(dst);
        std::sort(images.begin(), images.end());
        if (std::adjacent_find(images.begin(), images.end()) != images.end()) run.injective = false;
    }
    for (const auto& [s, w] : out_mass) {
        run.output.strings.push_back(s);
        run.output.probs.push_back(w);
    }
    return run;
}

QuantumReport execute_plan_quantum(const DistillationPlan& plan) {
    require(!plan.coherent, ErrorCode::InvalidParameter, "coherent plans need the input state");
    const double p = plan.p;
    const double probs[2] = {1.0 - p, p};
    return execute_plan_quantum(plan, DensityMatrix::diagonal(std::span<const double>(probs, 2)));
}

QuantumReport execute_plan_quantum(const DistillationPlan& plan, const DensityMatrix& rho) {
    const int len = static_cast<int>(plan.ell + plan.n);
    require(len <= kMaxQuantumQubits, ErrorCode::UnsupportedSize, "quantum execution is limited to 14 qubits");
    require(rho.dimension() == 2, ErrorCode::UnsupportedDimension, "quantum execution needs a qubit resource");
    const int n = static_cast<int>(plan.n);
    const int ell = static_cast<int>(plan.ell);
    const int m = static_cast<int>(plan.m);
    QuantumReport rep;
    rep.total_qubits = len;
    rep.m = plan.m;
    rep.failure_mass = plan.failure_mass;
    rep.work_error_bound = plan.work_error_bound();

    const PermutationMap perm = distillation_permutation(plan);
    rep.bijective = perm.bijective();
    rep.commutes = perm.preserves_weight();

    const std::size_t rdim = std::size_t{1} << n;
    const bool dense = plan.coherent || !rho.is_diagonal(0.0);
    Matrix state;
    Eigen::VectorXd diag;
    if (dense) {
        require(n <= kCoherentResourceLimit, ErrorCode::UnsupportedSize,
                "coherent quantum execution keeps at most 10 resource qubits");
        Matrix power = Matrix::Identity(1, 1);
        for (int i = 0; i < n; ++i) power = kron(power, rho.matrix());
        Matrix rotation = Matrix::Identity(static_cast<Eigen::Index>(rdim), static_cast<Eigen::Index>(rdim));
        if (plan.coherent) {
            // Typical projector in the eigenbasis of rho; index bit 0 selects the minor eigenvector.
            Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
            Matrix basis = Matrix::Identity(1, 1);
            for (int i = 0; i < n; ++i) basis = kron(basis, es.eigenvectors());
            Eigen::VectorXd keep(static_cast<Eigen::Index>(rdim));
            for (std::size_t s = 0; s < rdim; ++s)
                keep(static_cast<Eigen::Index>(s)) = plan.eigen_window.contains(n - popcount(s)) ? 1.0 : 0.0;
            const Matrix projector = basis * keep.asDiagonal() * basis.adjoint();
            for (Count r = plan.resource_window.lo; r <= plan.resource_window.hi; ++r) {
                const auto block = enumerate_fixed_weight(n, static_cast<int>(r));
                const auto bd = static_cast<Eigen::Index>(block.size());
                Matrix sub(bd, bd);
                for (Eigen::Index i = 0; i < bd; ++i)
                    for (Eigen::Index j = 0; j < bd; ++j)
                        sub(i, j) = projector(static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)]),
                                              static_cast<Eigen::Index>(block[static_cast<std::size_t>(j)]));
                Eigen::SelfAdjointEigenSolver<Matrix> bs(0.5 * (sub + sub.adjoint()));
                // Descending eigenvectors land on the lexicographically first strings.
                for (Eigen::Index i = 0; i < bd; ++i)
                    for (Eigen::Index j = 0; j < bd; ++j)
                        rotation(static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)]),
                                 static_cast<Eigen::Index>(block[static_cast<std::size_t>(j)])) =
                            std::conj(bs.eigenvectors()(j, bd - 1 - i));
            }
            for (Eigen::Index i = 0; i < rotation.rows(); ++i)
                for (Eigen::Index j = 0; j < rotation.cols(); ++j)
                    if (rotation(i, j) != Complex{0.0, 0.0} && popcount(static_cast<Bits>(i)) != popcount(static_cast<Bits>(j)))
                        rep.commutes = false;
            const Matrix check = rotation.adjoint() * rotation -
                                 Matrix::Identity(static_cast<Eigen::Index>(rdim), static_cast<Eigen::Index>(rdim));
            rep.rotation_unitarity_error = check.cwiseAbs().maxCoeff();
        }
        state = rotation * power * rotation.adjoint();
    } else {
        diag.resize(static_cast<Eigen::Index>(rdim));
        for (std::size_t s = 0; s < rdim; ++s) diag(static_cast<Eigen::Index>(s)) = string_prob(s, n, rho(1, 1).real());
    }

    const std::size_t wdim = std::size_t{1} << m;
    Matrix work = Matrix::Zero(static_cast<Eigen::Index>(wdim), static_cast<Eigen::Index>(wdim));
    const Bits wmask = all_ones(m);
    std::vector<std::pair<Bits, std::size_t>> grouped(rdim);  // (exhaust, resource string)
    for (Bits b = 0; b < (Bits{1} << ell); ++b) {
        const double gb = string_prob(b, ell, plan.q);
        if (!(gb > 0.0)) continue;
        if (!dense) {
            for (std::size_t x = 0; x < rdim; ++x) {
                const Bits out = perm.image[concat(b, x, n)];
                const auto a = static_cast<Eigen::Index>(out & wmask);
                work(a, a) += gb * diag(static_cast<Eigen::Index>(x));
            }
            continue;
        }
        for (std::size_t x = 0; x < rdim; ++x) grouped[x] = {perm.image[concat(b, x, n)] >> m, x};
        std::sort(grouped.begin(), grouped.end());
        for (std::size_t lo = 0; lo < rdim;) {
            std::size_t hi = lo;
            while (hi < rdim && grouped[hi].first == grouped[lo].first) ++hi;
            for (std::size_t i = lo; i < hi; ++i) {
                const std::size_t x = grouped[i].second;
                const auto ax = static_cast<Eigen::Index>(perm.image[concat(b, x, n)] & wmask);
                for (std::size_t j = lo; j < hi; ++j) {
                    const std::size_t y = grouped[j].second;
                    const auto ay = static_cast<Eigen::Index>(perm.image[concat(b, y, n)] & wmask);
                    work(ax, ay) += gb * state(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
                }
            }
            lo = hi;
        }
    }
    rep.output_trace = work.trace().real();
    rep.trace_preserving = rep.bijective && std::abs(rep.output_trace - 1.0) <= 1e-12;
    Matrix target = Matrix::Zero(work.rows(), work.cols());
    target(static_cast<Eigen::Index>(wmask), static_cast<Eigen::Index>(wmask)) = 1.0;
    rep.work_trace_distance = 0.5 * trace_norm(0.5 * (work + work.adjoint()) - target);
    rep.within_bound = rep.work_trace_distance <= rep.work_error_bound + 1e-12;
    return rep;
}

ExhaustReport exhaust_analysis(const DistillationPlan& plan, Count block_size) {
    require(!plan.coherent, ErrorCode::InvalidParameter, "exhaust analysis covers diagonal plans");
    require(block_size >= 1, ErrorCode::InvalidParameter, "block size must be positive");
    require(plan.k <= 22, ErrorCode::UnsupportedSize, "exhaust analysis needs k <= 22");
    const auto run = execute_plan_classical(plan, StringDistribution::product(plan.ell, plan.q, plan.n, plan.p));
    const int k = static_cast<int>(plan.k);
    const int m = static_cast<int>(plan.m);
    std::vector<double> pi(std::size_t{1} << k, 0.0);
    for (std::size_t i = 0; i < run.output.strings.size(); ++i) pi[run.output.strings[i] >> m] += run.output.probs[i];

    ExhaustReport rep;
    rep.block_size = block_size;
    rep.exhaust_length = plan.k;
    double total = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s)
        if (pi[s] > 0.0) total += pi[s] * (std::log(pi[s]) - std::log(string_prob(s, k, plan.q)));
    rep.total_rel_entropy = std::max(0.0, total);
    rep.per_system_rel_entropy = k > 0 ? rep.total_rel_entropy / static_cast<double>(k) : 0.0;

    const int bl = static_cast<int>(block_size);
    double block_sum = 0.0;
    rep.pinsker_holds = true;
    for (int start = 0; start + bl <= k; start += bl) {
        std::vector<double> marginal(std::size_t{1} << bl, 0.0);
        const int shift = k - start - bl;
        for (std::size_t s = 0; s < pi.size(); ++s) marginal[low_bits(s >> shift, bl)] += pi[s];
        std::vector<double> gamma(marginal.size());
        double tn = 0.0;
        for (std::size_t s = 0; s < marginal.size(); ++s) {
            gamma[s] = string_prob(s, bl, plan.q);
            tn += std::abs(marginal[s] - gamma[s]);
        }
        const double mass = std::accumulate(marginal.begin(), marginal.end(), 0.0);
        for (double& x : marginal) x /= mass;
        const double d = std::max(0.0, classical_relative_entropy(marginal, gamma));
        rep.reduced_states.push_back(DensityMatrix::diagonal(marginal));
        rep.rel_entropies.push_back(d);
        rep.pinsker_bounds.push_back(std::sqrt(2.0 * d));
        rep.measured_trace_norms.push_back(tn);
        rep.pinsker_holds = rep.pinsker_holds && tn <= std::sqrt(2.0 * d) + 1e-12;
        block_sum += d;
    }
    rep.subadditive = block_sum <= rep.total_rel_entropy + 1e-10;
    return rep;
}

WorkLedgerAudit work_balance_audit(const ClassicalExecution& run) {
    WorkLedgerAudit audit;
    audit.trajectories = run.trajectories.size();
    const int w = run.work_length;
    for (const auto& t : run.trajectories) {
        const Count gap = std::abs(static_cast<Count>(popcount(t.input)) - static_cast<Count>(popcount(t.output)));
        audit.max_imbalance = std::max(audit.max_imbalance, gap);
        audit.expected_work +=
            t.prob * static_cast<double>(popcount(low_bits(t.output, w)) - popcount(low_bits(t.input, w)));
    }
    audit.balanced = audit.max_imbalance == 0;
    if (!audit.balanced)
        fail(ErrorCode::AuditFailure,
             "energy is not conserved on some trajectory (imbalance " + std::to_string(audit.max_imbalance) + ")");
    return audit;
}

}  // namespace athermal
