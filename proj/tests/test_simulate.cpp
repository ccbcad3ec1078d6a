#include <doctest.h>

#include <map>
#include <set>

#include "athermal/error.hpp"
#include "athermal/simulate.hpp"
#include "oracles.hpp"

using namespace athermal;
using doctest::Approx;

namespace {
// Largest m for which an explicit greedy injection exists: inputs of the type
// pair into strings of equal weight ending in 1^m. By Hall's condition on a
// complete bipartite graph this is a pure counting question, checked here by
// enumerating output strings directly.
Count enumerate_max_m(int ell, int g, int n, int r) {
    const int len = ell + n, weight = g + r;
    const auto inputs = oracle::choose(ell, g) * oracle::choose(n, r);
    Count best = 0;
    for (int m = 0; m <= std::min(weight, len); ++m) {
        oracle::u128 outputs = 0;
        for (Bits s = 0; s < (Bits{1} << len); ++s)
            if (popcount(s) == weight && low_bits(s, m) == all_ones(m)) ++outputs;
        if (outputs >= inputs) best = m;
    }
    return best;
}

const double kQ = 1.0 / (1.0 + std::exp(1.0));
}  // namespace

TEST_SUITE("simulate") {
    TEST_CASE("oracle examples") {
        CHECK(oracle_max_m(4, 1, 2, 2) == 2);
        CHECK(oracle_max_m(3, 0, 3, 0) == 0);
        CHECK(oracle_max_m(0, 0, 2, 2) == 2);
    }

    TEST_CASE("oracle against output enumeration") {
        for (int ell = 0; ell <= 7; ++ell)
            for (int n = 0; n + ell <= 12; ++n)
                for (int g = 0; g <= ell; ++g)
                    for (int r = 0; r <= n; ++r) CHECK(oracle_max_m(ell, g, n, r) == enumerate_max_m(ell, g, n, r));
    }

    TEST_CASE("identity permutation leaves the input unchanged") {
        const auto input = StringDistribution::product(3, mpq_class(1, 4), 2, mpq_class(3, 4));
        const auto run = execute_permutation(PermutationMap::identity(5), input, 0);
        REQUIRE(run.output.strings.size() == input.strings.size());
        std::map<Bits, mpq_class> in, out;
        for (std::size_t i = 0; i < input.strings.size(); ++i) in[input.strings[i]] = input.exact[i];
        for (std::size_t i = 0; i < run.output.strings.size(); ++i) out[run.output.strings[i]] = run.output.exact[i];
        CHECK(in == out);
    }

    TEST_CASE("the four-bath-qubit instance delivers 11 on its typical type") {
        const auto plan = plan_distillation_with_bath(2, 4, 1.0, std::log(3.0), 0.01);
        REQUIRE(plan.m == 2);
        REQUIRE(plan.bath_window.lo == 1);
        REQUIRE(plan.bath_window.hi == 1);
        // Only the typical type: bath weight 1, resource 11.
        StringDistribution typical;
        typical.length = 6;
        for (Bits b : enumerate_fixed_weight(4, 1)) {
            typical.strings.push_back(concat(b, 0b11, 2));
            typical.probs.push_back(0.25);
            typical.exact.emplace_back(1, 4);
        }
        const auto run = execute_plan_classical(plan, typical);
        CHECK(run.injective);
        CHECK(run.ones_conserved);
        REQUIRE(run.exact_success);
        CHECK(*run.exact_success == 1);
        for (Bits s : run.output.strings) CHECK(low_bits(s, 2) == 0b11);
        CHECK(run.output.exact_total() == 1);
    }

    TEST_CASE("rational execution conserves probability exactly") {
        for (Count ell : {4, 7, 10})
            for (Count n : {2, 3}) {
                const auto plan = plan_distillation_with_bath(n, ell, 0.9, 1.0, 1.0);
                const auto input = StringDistribution::product(ell, mpq_class(1, 4), n, mpq_class(9, 10));
                const auto run = execute_plan_classical(plan, input);
                CHECK(run.output.exact_total() == 1);
                CHECK(run.ones_conserved);
                CHECK(run.injective);
                CHECK(1.0 - run.success_probability <= plan.failure_mass + 1e-12);
            }
    }

    TEST_CASE("permutations are weight-preserving bijections") {
        for (Count ell = 1; ell <= 10; ++ell)
            for (Count n = 1; n + ell <= 14; ++n) {
                const auto plan = plan_distillation_with_bath(n, ell, 0.9, 1.0, 0.5);
                const auto perm = distillation_permutation(plan);
                CHECK(perm.bijective());
                CHECK(perm.preserves_weight());
            }
    }

    TEST_CASE("quantum execution is legal and within the failure bound") {
        for (Count ell = 2; ell <= 10; ell += 2)
            for (Count n = 1; n + ell <= 12; ++n)
                for (double p : {0.9, 1.0}) {
                    const auto plan = plan_distillation_with_bath(n, ell, p, 1.0, 1.0);
                    const auto rep = execute_plan_quantum(plan);
                    CHECK(rep.commutes);
                    CHECK(rep.bijective);
                    CHECK(rep.trace_preserving);
                    CHECK(rep.output_trace == Approx(1.0).epsilon(1e-12));
                    CHECK(rep.work_trace_distance <= plan.failure_mass + 1e-12);
                }
    }

    TEST_CASE("plans with no output are unital permutations") {
        const auto plan = plan_distillation_with_bath(3, 6, kQ, 1.0);
        REQUIRE(plan.m == 0);
        const auto rep = execute_plan_quantum(plan);
        CHECK(rep.trace_preserving);
        CHECK(rep.commutes);
        CHECK(rep.work_trace_distance == Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("coherent inputs stay within the square-root bound") {
        Vector v(2);
        v << std::sqrt(0.2), std::sqrt(0.8);
        const auto rho = DensityMatrix::pure(v);
        for (Count ell : {4, 6}) {
            const auto plan = plan_distillation_general_with_bath(rho, 4, ell, 1.0, 1.0);
            const auto rep = execute_plan_quantum(plan, rho);
            CHECK(rep.commutes);
            CHECK(rep.trace_preserving);
            CHECK(rep.rotation_unitarity_error < 1e-10);
            CHECK(rep.work_trace_distance <= plan.work_error_bound() + 1e-12);
        }
    }

    TEST_CASE("exhaust of a Gibbs input is Gibbs") {
        const auto plan = plan_distillation_with_bath(3, 6, kQ, 1.0);
        REQUIRE(plan.m == 0);
        const auto rep = exhaust_analysis(plan);
        CHECK(rep.total_rel_entropy == Approx(0.0).epsilon(1e-10));
        for (double d : rep.rel_entropies) CHECK(d == Approx(0.0).epsilon(1e-10));
    }

    TEST_CASE("exhaust statistics satisfy Pinsker and subadditivity") {
        const auto g = gibbs_state(Hamiltonian::two_level(), 1.0);
        for (Count n : {4, 6}) {
            const auto plan = plan_distillation_with_bath(n, 16, 0.9, 1.0, 1.0);
            for (Count block : {1, 2}) {
                const auto rep = exhaust_analysis(plan, block);
                CHECK(rep.pinsker_holds);
                CHECK(rep.subadditive);
                for (std::size_t i = 0; i < rep.rel_entropies.size(); ++i) {
                    CHECK(rep.measured_trace_norms[i] <= std::sqrt(2.0 * rep.rel_entropies[i]) + 1e-12);
                    if (block == 1)
                        CHECK(rep.rel_entropies[i] ==
                              Approx(oracle::relative_entropy(rep.reduced_states[i].matrix(), g.density().matrix())).epsilon(1e-9));
                }
            }
        }
    }

    TEST_CASE("work audit") {
        const auto plan = plan_distillation_with_bath(3, 8, 0.9, 1.0, 1.0);
        const auto run = execute_plan_classical(plan, StringDistribution::product(8, kQ, 3, 0.9));
        const auto audit = work_balance_audit(run);
        CHECK(audit.balanced);
        CHECK(audit.max_imbalance == 0);

        // Gibbs-only input: the work register cannot gain energy on average.
        const auto gibbs = execute_plan_classical(plan, StringDistribution::product(8, kQ, 3, kQ));
        CHECK(work_balance_audit(gibbs).expected_work <= 1e-12);

        // Break one trajectory: flip a bit of an output string.
        auto broken = run;
        REQUIRE_FALSE(broken.trajectories.empty());
        broken.trajectories.front().output ^= 1;
        CHECK_THROWS_AS(work_balance_audit(broken), Error);
    }

    TEST_CASE("formation execution") {
        const auto plan = plan_formation(2, 0.75, 1.0, 1.0);
        const auto run = execute_plan_classical(plan, StringDistribution::product(plan.ell, kQ, 0, 0.0));
        CHECK(run.injective);
        CHECK(run.ones_conserved);
        CHECK(work_balance_audit(run).balanced);
    }

    TEST_CASE("size limits") {
        const auto big = plan_distillation(40, 0.75, 1.0);
        CHECK_THROWS_AS(execute_plan_quantum(big), Error);
    }
}
