#include "athermal/athermal.h"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include "athermal/coherent.hpp"
#include "athermal/error.hpp"
#include "athermal/multilevel.hpp"
#include "athermal/properties.hpp"
#include "athermal/serialize.hpp"

struct athermal_result {
    std::string json;
    std::string csv;
    std::string summary;
};

namespace {

using namespace athermal;

thread_local std::string g_last_error;

struct Output {
    Json json;
    std::string csv;
    std::string summary;
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

double num(const Json& c, const char* key, double fallback) {
    return c.contains(key) ? number_from_json(c.at(key)) : fallback;
}
double num(const Json& c, const char* key) {
    require(c.contains(key), ErrorCode::InvalidParameter, std::string("missing parameter '") + key + "'");
    return number_from_json(c.at(key));
}
Count count(const Json& c, const char* key) {
    require(c.contains(key), ErrorCode::InvalidParameter, std::string("missing parameter '") + key + "'");
    return c.at(key).get<Count>();
}
Count count(const Json& c, const char* key, Count fallback) { return c.contains(key) ? c.at(key).get<Count>() : fallback; }

unsigned threads(const Json& c) {
    if (c.contains("threads")) return std::max<unsigned>(1, c.at("threads").get<unsigned>());
    if (const char* env = std::getenv("ATHERMAL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

DensityMatrix state_from(const Json& s) {
    const auto re = s.at("real").get<std::vector<std::vector<double>>>();
    const auto d = static_cast<Eigen::Index>(re.size());
    std::vector<std::vector<double>> im(re.size(), std::vector<double>(re.size(), 0.0));
    if (s.contains("imag")) im = s.at("imag").get<std::vector<std::vector<double>>>();
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        require(re[static_cast<std::size_t>(i)].size() == re.size(), ErrorCode::InvalidParameter, "state must be square");
        for (Eigen::Index j = 0; j < d; ++j)
            m(i, j) = Complex(re[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                              im[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    return DensityMatrix(m);
}

Json envelope(const char* kind, Json body, Json units) {
    body["kind"] = kind;
    body["schema_version"] = kSchemaVersion;
    body["units"] = std::move(units);
    return body;
}

Output cmd_rate(const Json& c) {
    const double beta = num(c, "beta");
    double free_energy_route = 0.0;
    double entropy_route = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    if (c.contains("state")) {
        const Json& s = c.at("state");
        const Hamiltonian h(s.at("energies").get<std::vector<double>>());
        const DensityMatrix rho = state_from(s);
        const GibbsState gamma = gibbs_state(h, beta);
        const std::size_t level = c.contains("target_level") ? c.at("target_level").get<std::size_t>() : h.max_level();
        const DensityMatrix sigma = DensityMatrix::basis_state(h.dimension(), level);
        const double f_gamma = -gamma.log_partition_function / beta;
        numerator = free_energy(rho, h, beta) - f_gamma;
        denominator = free_energy(sigma, h, beta) - f_gamma;
        require(denominator > 0.0, ErrorCode::FreeTarget, "target is the Gibbs state: the rate denominator vanishes");
        free_energy_route = numerator / denominator;
        entropy_route = interconversion_rate(rho, sigma, gamma);
        numerator *= beta;
        denominator *= beta;
    } else {
        const double q = two_level_excitation(beta);
        const bool gibbs = c.contains("p") && c.at("p").is_string() && c.at("p").get<std::string>() == "gibbs";
        const double p = gibbs ? q : num(c, "p");
        const double t = num(c, "target_p", 1.0);
        numerator = binary_entropy(q) - binary_entropy(p) + beta * (p - q);
        denominator = binary_entropy(q) - binary_entropy(t) + beta * (t - q);
        const GibbsState gamma = gibbs_state(Hamiltonian::two_level(), beta);
        const double pr[2] = {1.0 - p, p};
        const double tr[2] = {1.0 - t, t};
        entropy_route = interconversion_rate(DensityMatrix::diagonal(std::span<const double>(pr, 2)),
                                             DensityMatrix::diagonal(std::span<const double>(tr, 2)), gamma);
        require(std::abs(denominator) > 0.0, ErrorCode::FreeTarget, "target is the Gibbs state: the rate denominator vanishes");
        free_energy_route = numerator / denominator;
    }
    Output o;
    o.json = envelope("rate",
                      {{"closed_form", number_to_json(free_energy_route)},
                       {"relative_entropy_ratio", number_to_json(entropy_route)},
                       {"difference", number_to_json(free_energy_route - entropy_route)},
                       {"numerator", number_to_json(numerator)},
                       {"denominator", number_to_json(denominator)},
                       {"beta", number_to_json(beta)}},
                      {{"closed_form", "dimensionless"},
                       {"relative_entropy_ratio", "dimensionless"},
                       {"difference", "dimensionless"},
                       {"numerator", "nats"},
                       {"denominator", "nats"},
                       {"beta", "inverse energy (1/E0)"}});
    o.summary = "R = " + fmt(free_energy_route) + " (closed form), " + fmt(entropy_route) +
                " (relative-entropy ratio), difference " + fmt(free_energy_route - entropy_route);
    return o;
}

DistillationPlan distill_plan(const Json& c) {
    const Count n = count(c, "n");
    const double beta = num(c, "beta");
    const double width = num(c, "width", kDefaultWidth);
    const Count limit = count(c, "exact_limit", kDefaultExactLimit);
    if (c.contains("state")) {
        const DensityMatrix rho = state_from(c.at("state"));
        return c.contains("ell") ? plan_distillation_general_with_bath(rho, n, count(c, "ell"), beta, width, limit)
                                 : plan_distillation_general(rho, n, beta, width, limit);
    }
    const double p = num(c, "p");
    return c.contains("ell") ? plan_distillation_with_bath(n, count(c, "ell"), p, beta, width, limit)
                             : plan_distillation(n, p, beta, width, limit);
}

std::string distill_summary(const DistillationPlan& p) {
    return "n=" + std::to_string(p.n) + " ell=" + std::to_string(p.ell) + " m=" + std::to_string(p.m) +
           " rate=" + fmt(p.achieved_rate) + " limit=" + fmt(p.rate_limit) + " failure_mass=" + fmt(p.failure_mass);
}

Output cmd_distill(const Json& c) {
    const DistillationPlan plan = distill_plan(c);
    return {to_json(plan), "", distill_summary(plan)};
}

Output cmd_form(const Json& c) {
    const Count n = count(c, "n");
    const double p = num(c, "p");
    const double beta = num(c, "beta");
    const double width = num(c, "width", kDefaultWidth);
    const Count limit = count(c, "exact_limit", kDefaultExactLimit);
    const double tol = num(c, "tolerance", kDefaultBirkhoffTolerance);
    const FormationPlan plan = c.contains("ell") ? plan_formation_with_bath(n, count(c, "ell"), p, beta, width, limit, tol)
                                                 : plan_formation(n, p, beta, width, limit, tol);
    return {to_json(plan), "",
            "n=" + std::to_string(plan.n) + " ell=" + std::to_string(plan.ell) + " m=" + std::to_string(plan.m) +
                " cost_rate=" + fmt(plan.cost_rate) + " limit=" + fmt(plan.rate_limit) +
                " failure_mass=" + fmt(plan.failure_mass)};
}

Output cmd_sweep(const Json& c) {
    const double p = num(c, "p");
    const double beta = num(c, "beta");
    const double width = num(c, "width", kDefaultWidth);
    const Count limit = count(c, "exact_limit", kDefaultExactLimit);
    const auto grid = c.contains("n_grid") ? c.at("n_grid").get<std::vector<Count>>()
                                           : std::vector<Count>{100, 1000, 10000, 100000};
    std::vector<SweepRow> rows(grid.size());
    std::vector<std::string> errors(grid.size());
    std::vector<ErrorCode> codes(grid.size(), ErrorCode::Internal);
    auto work = [&](std::size_t i) {
        try {
            const DistillationPlan plan = plan_distillation(grid[i], p, beta, width, limit);
            rows[i] = {plan.n, plan.ell, plan.m, plan.achieved_rate, plan.rate_limit - plan.achieved_rate, plan.failure_mass};
        } catch (const Error& e) {
            errors[i] = e.what();
            codes[i] = e.code();
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    const unsigned workers = std::min<unsigned>(threads(c), static_cast<unsigned>(std::max<std::size_t>(1, grid.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) work(i);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < grid.size(); i += workers) work(i);
            });
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!errors[i].empty()) fail(codes[i], "n=" + std::to_string(grid[i]) + ": " + errors[i]);
    Json rows_json = Json::array();
    for (const auto& r : rows)
        rows_json.push_back({{"n", r.n},
                             {"ell", r.ell},
                             {"m", r.m},
                             {"rate", number_to_json(r.rate)},
                             {"deficit", number_to_json(r.deficit)},
                             {"failure_mass", number_to_json(r.failure_mass)}});
    Output o;
    o.json = envelope("sweep",
                      {{"p", number_to_json(p)}, {"beta", number_to_json(beta)}, {"width", number_to_json(width)},
                       {"rate_limit", number_to_json(rate_limit(p, beta))}, {"rows", rows_json}},
                      {{"rows.rate", "dimensionless"},
                       {"rows.deficit", "dimensionless"},
                       {"rows.failure_mass", "probability"},
                       {"rate_limit", "dimensionless"}});
    o.csv = sweep_to_csv(rows);
    o.summary = std::to_string(rows.size()) + " rows, rate limit " + fmt(rate_limit(p, beta));
    return o;
}

Output cmd_simulate(const Json& c) {
    const DistillationPlan plan = distill_plan(c);
    const std::string mode = c.value("mode", std::string("classical"));
    Output o;
    Json body = {{"plan", to_json(plan)}};
    if (mode == "quantum") {
        const QuantumReport q = c.contains("state") ? execute_plan_quantum(plan, state_from(c.at("state")))
                                                    : execute_plan_quantum(plan);
        body["quantum"] = to_json(q);
        o.summary = distill_summary(plan) + " work_trace_distance=" + fmt(q.work_trace_distance) +
                    " commutes=" + (q.commutes ? "true" : "false");
    } else {
        require(mode == "classical", ErrorCode::InvalidParameter, "mode must be classical or quantum");
        require(!plan.coherent, ErrorCode::InvalidParameter, "classical execution needs a diagonal resource");
        const StringDistribution input =
            c.value("rational", false)
                ? StringDistribution::product(plan.ell, mpq_class(plan.q), plan.n, mpq_class(plan.p))
                : StringDistribution::product(plan.ell, plan.q, plan.n, plan.p);
        const ClassicalExecution run = execute_plan_classical(plan, input);
        body["execution"] = to_json(run);
        body["audit"] = to_json(work_balance_audit(run));
        o.csv = distribution_to_csv(run.output);
        o.summary = distill_summary(plan) + " success=" + fmt(run.success_probability);
    }
    o.json = envelope("simulation", std::move(body), Json::object());
    return o;
}

Output cmd_oracle(const Json& c) {
    const Count ell = count(c, "ell"), g = count(c, "gibbs_ones"), n = count(c, "n"), r = count(c, "resource_ones");
    const Count oracle = oracle_max_m(ell, g, n, r);
    const Count solver = solve_single_type(ell, g, n, r);
    Output o;
    o.json = envelope("oracle", {{"oracle_m", oracle}, {"solver_m", solver}, {"agree", oracle == solver}},
                      {{"oracle_m", "count"}, {"solver_m", "count"}});
    o.summary = "m=" + std::to_string(oracle) + (oracle == solver ? " (solver agrees)" : " (solver disagrees)");
    return o;
}

Output cmd_exhaust(const Json& c) {
    const DistillationPlan plan = distill_plan(c);
    const ExhaustReport r = exhaust_analysis(plan, count(c, "block", 1));
    return {to_json(r), "",
            distill_summary(plan) + " D_per_system=" + fmt(r.per_system_rel_entropy) +
                " pinsker=" + (r.pinsker_holds ? "holds" : "violated")};
}

Output cmd_frame(const Json& c) {
    const Count window = count(c, "N");
    const Count delta = count(c, "delta", 0);
    const double overlap = shift_overlap(window, delta);
    Output o;
    o.json = envelope("frame",
                      {{"N", window},
                       {"delta", delta},
                       {"shift_overlap", number_to_json(overlap)},
                       {"err_norm", number_to_json(err_norm(delta, window))}},
                      {{"N", "frame energy levels"},
                       {"delta", "energy (units of E0)"},
                       {"shift_overlap", "dimensionless"},
                       {"err_norm", "vector norm"}});
    o.summary = "shift_overlap=" + fmt(overlap);
    return o;
}

Output cmd_coherent(const Json& c) {
    const CoherentTarget target(Complex(num(c, "a_re"), num(c, "a_im", 0.0)), Complex(num(c, "b_re"), num(c, "b_im", 0.0)),
                                num(c, "p", 1.0), count(c, "n"));
    const CoherentReport r = coherent_formation_error(target, c.value("exact", false));
    std::string s = "analytic_bound=" + fmt(r.analytic_bound);
    if (r.trace_distance) s += " trace_distance=" + fmt(*r.trace_distance);
    return {to_json(r), "", s};
}

Output cmd_work(const Json& c) {
    const Hamiltonian h(c.at("energies").get<std::vector<double>>());
    const FrequencyVector f(c.at("f_rho").get<std::vector<double>>());
    const WorkLedger w = max_work(f, h, num(c, "beta"), count(c, "n"), count(c, "ell", 0), num(c, "width", kDefaultWidth));
    return {to_json(w), "", "W=" + fmt(w.extracted) + " per_copy=" + fmt(w.per_copy) + " limit=" + fmt(w.limit_per_copy)};
}

Output cmd_properties(const Json& c) {
    const auto seed = c.contains("seed") ? c.at("seed").get<std::uint64_t>() : std::uint64_t{1};
    const auto s = run_property_checks(seed, c.value("count", std::size_t{10000}), c.value("max_dim", std::size_t{16}));
    Output o;
    o.json = envelope("properties",
                      {{"seed", s.seed},
                       {"instances", s.instances},
                       {"max_dimension", s.max_dimension},
                       {"affinity_violations", s.affinity_violations},
                       {"subextensivity_violations", s.subextensivity_violations},
                       {"additivity_violations", s.additivity_violations},
                       {"continuity_violations", s.continuity_violations},
                       {"closed_form_violations", s.closed_form_violations},
                       {"worst_affinity_excess", number_to_json(s.worst_affinity_excess)},
                       {"worst_subextensivity_excess", number_to_json(s.worst_subextensivity_excess)},
                       {"worst_additivity_error", number_to_json(s.worst_additivity_error)},
                       {"worst_continuity_ratio", number_to_json(s.worst_continuity_ratio)},
                       {"worst_closed_form_error", number_to_json(s.worst_closed_form_error)}},
                      {{"worst_affinity_excess", "nats"},
                       {"worst_subextensivity_excess", "nats"},
                       {"worst_additivity_error", "nats"},
                       {"worst_continuity_ratio", "dimensionless"},
                       {"worst_closed_form_error", "nats"}});
    o.summary = std::to_string(s.violations()) + " violations in " + std::to_string(s.instances) + " instances";
    return o;
}

const std::map<std::string, std::function<Output(const Json&)>>& commands() {
    static const std::map<std::string, std::function<Output(const Json&)>> table = {
        {"rate", cmd_rate},       {"distill", cmd_distill}, {"form", cmd_form},         {"sweep", cmd_sweep},
        {"simulate", cmd_simulate}, {"oracle", cmd_oracle}, {"exhaust", cmd_exhaust},   {"frame", cmd_frame},
        {"coherent", cmd_coherent}, {"work", cmd_work},     {"properties", cmd_properties}};
    return table;
}

athermal_status guarded(const std::function<Output()>& body, athermal_result** out) {
    if (out) *out = nullptr;
    try {
        require(out != nullptr, ErrorCode::InvalidParameter, "result pointer is null");
        Output o = body();
        *out = new athermal_result{dump(o.json), std::move(o.csv), std::move(o.summary)};
        g_last_error.clear();
        return ATHERMAL_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<athermal_status>(static_cast<int>(e.code()));
    } catch (const Json::exception& e) {
        g_last_error = std::string("invalid-parameter: ") + e.what();
        return ATHERMAL_INVALID_PARAMETER;
    } catch (const std::exception& e) {
        g_last_error = std::string("internal: ") + e.what();
        return ATHERMAL_INTERNAL;
    }
}

}  // namespace

extern "C" {

athermal_status athermal_run(const char* command, const char* config_json, athermal_result** out) {
    return guarded(
        [&]() -> Output {
            require(command != nullptr, ErrorCode::InvalidParameter, "command is null");
            const auto it = commands().find(command);
            require(it != commands().end(), ErrorCode::InvalidParameter, std::string("unknown command '") + command + "'");
            const Json config = (config_json && *config_json) ? Json::parse(config_json) : Json::object();
            require(config.is_object(), ErrorCode::InvalidParameter, "configuration must be a JSON object");
            return it->second(config);
        },
        out);
}

athermal_status athermal_roundtrip(const char* document_json, athermal_result** out) {
    return guarded(
        [&]() -> Output {
            require(document_json != nullptr, ErrorCode::InvalidParameter, "document is null");
            const Json doc = Json::parse(document_json);
            const std::string kind = doc.value("kind", std::string());
            if (kind == "distillation_plan") return {to_json(distillation_plan_from_json(doc)), "", kind};
            if (kind == "formation_plan") return {to_json(formation_plan_from_json(doc)), "", kind};
            fail(ErrorCode::InvalidParameter, "round trip supports distillation_plan and formation_plan documents");
        },
        out);
}

const char* athermal_result_json(const athermal_result* r) { return r ? r->json.c_str() : ""; }
const char* athermal_result_csv(const athermal_result* r) { return r ? r->csv.c_str() : ""; }
const char* athermal_result_summary(const athermal_result* r) { return r ? r->summary.c_str() : ""; }
void athermal_result_free(athermal_result* r) { delete r; }

const char* athermal_last_error(void) { return g_last_error.c_str(); }

const char* athermal_status_name(athermal_status status) {
    if (status == ATHERMAL_OK) return "ok";
    if (status < ATHERMAL_OK || status > ATHERMAL_INTERNAL) return "unknown";
    return athermal::to_string(static_cast<athermal::ErrorCode>(static_cast<int>(status)));
}

int athermal_exit_code(athermal_status status) {
    switch (status) {
        case ATHERMAL_OK: return 0;
        case ATHERMAL_INTERNAL:
        case ATHERMAL_AUDIT_FAILURE: return 1;
        default: return 2;
    }
}

int athermal_schema_version(void) { return athermal::kSchemaVersion; }

}  // extern "C"
