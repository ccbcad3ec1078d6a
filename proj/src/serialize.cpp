#include "athermal/serialize.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "athermal/error.hpp"

namespace athermal {

namespace {

Json big(const std::optional<BigCount>& v) { return v ? Json(v->str()) : Json(nullptr); }

std::optional<BigCount> big_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return BigCount(mpz_class(j.get<std::string>()));
}

Json range(const CountRange& r) { return Json::array({r.lo, r.hi}); }
CountRange range_from(const Json& j) { return {j.at(0).get<Count>(), j.at(1).get<Count>()}; }

Json type(const TypeDescriptor& t) { return Json(t.counts); }
TypeDescriptor type_from(const Json& j) {
    auto c = j.get<std::vector<Count>>();
    return c.empty() ? TypeDescriptor() : TypeDescriptor(std::move(c));
}

Json numbers(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number_to_json(x));
    return a;
}
std::vector<double> numbers_from(const Json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(number_from_json(x));
    return v;
}

Json pair_json(const std::pair<Count, Count>& p) { return Json::array({p.first, p.second}); }
std::pair<Count, Count> pair_from(const Json& j) { return {j.at(0).get<Count>(), j.at(1).get<Count>()}; }

Json envelope(const char* kind, Json body, Json units) {
    body["kind"] = kind;
    body["schema_version"] = kSchemaVersion;
    body["units"] = std::move(units);
    return body;
}

void check_envelope(const Json& j, const char* kind) {
    require(j.value("schema_version", 0) == kSchemaVersion, ErrorCode::InvalidParameter, "unsupported schema_version");
    require(j.value("kind", std::string()) == kind, ErrorCode::InvalidParameter,
            std::string("document is not a ") + kind);
}

std::string shortest(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::InvalidParameter,
            "malformed number '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

Json matrix_json(const Matrix& m) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json rr = Json::array(), ii = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(number_to_json(m(i, j).real()));
            ii.push_back(number_to_json(m(i, j).imag()));
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return Json{{"real", re}, {"imag", im}};
}

const Json kProbability = "probability";
const Json kNats = "nats";
const Json kDimensionless = "dimensionless";
const Json kEnergy = "energy (units of E0)";
const Json kCount = "count";

}  // namespace

Json number_to_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double number_from_json(const Json& j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const DistillationPlan& p) {
    Json records = Json::array();
    for (const auto& r : p.records) {
        records.push_back({{"bath", type(r.bath)},
                           {"resource", type(r.resource)},
                           {"exhaust", type(r.exhaust)},
                           {"log_input_count", number_to_json(r.log_input_count)},
                           {"log_exhaust_count", number_to_json(r.log_exhaust_count)},
                           {"input_count", big(r.input_count)},
                           {"exhaust_count", big(r.exhaust_count)},
                           {"shell_offset", big(r.shell_offset)}});
    }
    Json blocks = Json::array();
    for (const auto& b : p.blocks) {
        blocks.push_back({{"energy", b.energy},
                          {"probability", number_to_json(b.probability)},
                          {"log_dimension", number_to_json(b.log_dimension)},
                          {"log_rank_cap", number_to_json(b.log_rank_cap)},
                          {"rank_cap", big(b.rank_cap)}});
    }
    Json body = {{"n", p.n},
                 {"ell", p.ell},
                 {"m", p.m},
                 {"k", p.k},
                 {"p", number_to_json(p.p)},
                 {"beta", number_to_json(p.beta)},
                 {"q", number_to_json(p.q)},
                 {"width", number_to_json(p.width)},
                 {"rate_limit", number_to_json(p.rate_limit)},
                 {"achieved_rate", number_to_json(p.achieved_rate)},
                 {"epsilon", number_to_json(p.epsilon)},
                 {"failure_mass", number_to_json(p.failure_mass)},
                 {"resource_mass", number_to_json(p.resource_mass)},
                 {"bath_mass", number_to_json(p.bath_mass)},
                 {"no_resource", p.no_resource},
                 {"exact_counting", p.exact_counting},
                 {"bath_window", range(p.bath_window)},
                 {"resource_window", range(p.resource_window)},
                 {"m_per_type_bound", p.m_per_type_bound},
                 {"binding_type", pair_json(p.binding_type)},
                 {"binding_shell", p.binding_shell},
                 {"records", records},
                 {"records_elided", p.records_elided},
                 {"record_count", p.record_count},
                 {"coherent", p.coherent},
                 {"entropy", number_to_json(p.entropy)},
                 {"blocks", blocks},
                 {"energy_mass", number_to_json(p.energy_mass)},
                 {"eigen_mass", number_to_json(p.eigen_mass)},
                 {"minor_eigenvalue", number_to_json(p.minor_eigenvalue)},
                 {"eigen_window", range(p.eigen_window)},
                 {"work_error_bound", number_to_json(p.work_error_bound())}};
    Json units = {{"n", kCount},
                  {"ell", kCount},
                  {"m", kCount},
                  {"k", kCount},
                  {"p", kProbability},
                  {"beta", "inverse energy (1/E0)"},
                  {"q", kProbability},
                  {"width", "standard deviations (sqrt n)"},
                  {"rate_limit", kDimensionless},
                  {"achieved_rate", kDimensionless},
                  {"epsilon", kDimensionless},
                  {"failure_mass", kProbability},
                  {"resource_mass", kProbability},
                  {"bath_mass", kProbability},
                  {"entropy", kNats},
                  {"energy_mass", kProbability},
                  {"eigen_mass", kProbability},
                  {"minor_eigenvalue", kProbability},
                  {"work_error_bound", "trace distance"},
                  {"records.log_input_count", kNats},
                  {"records.log_exhaust_count", kNats},
                  {"blocks.energy", kEnergy},
                  {"blocks.log_dimension", kNats},
                  {"blocks.log_rank_cap", kNats}};
    return envelope("distillation_plan", std::move(body), std::move(units));
}

DistillationPlan distillation_plan_from_json(const Json& j) {
    check_envelope(j, "distillation_plan");
    DistillationPlan p;
    p.n = j.at("n").get<Count>();
    p.ell = j.at("ell").get<Count>();
    p.m = j.at("m").get<Count>();
    p.k = j.at("k").get<Count>();
    p.p = number_from_json(j.at("p"));
    p.beta = number_from_json(j.at("beta"));
    p.q = number_from_json(j.at("q"));
    p.width = number_from_json(j.at("width"));
    p.rate_limit = number_from_json(j.at("rate_limit"));
    p.achieved_rate = number_from_json(j.at("achieved_rate"));
    p.epsilon = number_from_json(j.at("epsilon"));
    p.failure_mass = number_from_json(j.at("failure_mass"));
    p.resource_mass = number_from_json(j.at("resource_mass"));
    p.bath_mass = number_from_json(j.at("bath_mass"));
    p.no_resource = j.at("no_resource").get<bool>();
    p.exact_counting = j.at("exact_counting").get<bool>();
    p.bath_window = range_from(j.at("bath_window"));
    p.resource_window = range_from(j.at("resource_window"));
    p.m_per_type_bound = j.at("m_per_type_bound").get<Count>();
    p.binding_type = pair_from(j.at("binding_type"));
    p.binding_shell = j.at("binding_shell").get<Count>();
    for (const auto& r : j.at("records")) {
        DistillationRecord rec;
        rec.bath = type_from(r.at("bath"));
        rec.resource = type_from(r.at("resource"));
        rec.exhaust = type_from(r.at("exhaust"));
        rec.log_input_count = number_from_json(r.at("log_input_count"));
        rec.log_exhaust_count = number_from_json(r.at("log_exhaust_count"));
        rec.input_count = big_from(r.at("input_count"));
        rec.exhaust_count = big_from(r.at("exhaust_count"));
        rec.shell_offset = big_from(r.at("shell_offset"));
        p.records.push_back(std::move(rec));
    }
    p.records_elided = j.at("records_elided").get<bool>();
    p.record_count = j.at("record_count").get<std::size_t>();
    p.coherent = j.at("coherent").get<bool>();
    p.entropy = number_from_json(j.at("entropy"));
    for (const auto& b : j.at("blocks")) {
        EnergyBlock e;
        e.energy = b.at("energy").get<Count>();
        e.probability = number_from_json(b.at("probability"));
        e.log_dimension = number_from_json(b.at("log_dimension"));
        e.log_rank_cap = number_from_json(b.at("log_rank_cap"));
        e.rank_cap = big_from(b.at("rank_cap"));
        p.blocks.push_back(std::move(e));
    }
    p.energy_mass = number_from_json(j.at("energy_mass"));
    p.eigen_mass = number_from_json(j.at("eigen_mass"));
    p.minor_eigenvalue = number_from_json(j.at("minor_eigenvalue"));
    p.eigen_window = range_from(j.at("eigen_window"));
    return p;
}

Json to_json(const FormationPlan& p) {
    Json records = Json::array();
    for (const auto& r : p.records) {
        records.push_back({{"bath", type(r.bath)},
                           {"target", type(r.target)},
                           {"exhaust", type(r.exhaust)},
                           {"log_input_count", number_to_json(r.log_input_count)},
                           {"log_output_count", number_to_json(r.log_output_count)},
                           {"input_count", big(r.input_count)},
                           {"exhaust_count", big(r.exhaust_count)},
                           {"target_count", big(r.target_count)},
                           {"exhaust_per_target_min", big(r.exhaust_per_target_min)},
                           {"exhaust_per_target_max", big(r.exhaust_per_target_max)}});
    }
    const auto& b = p.birkhoff;
    Json birkhoff = {{"sets", b.sets},
                     {"class_counts", b.class_counts},
                     {"class_weights", numbers(b.class_weights)},
                     {"class_sizes", b.class_sizes},
                     {"target_weights", numbers(b.target_weights)},
                     {"achieved_weights", numbers(b.achieved_weights)},
                     {"max_deviation", number_to_json(b.max_deviation)},
                     {"total_deviation", number_to_json(b.total_deviation)},
                     {"tolerance", number_to_json(b.tolerance)},
                     {"max_weight", number_to_json(b.max_weight)},
                     {"best_effort", b.best_effort},
                     {"grouped", b.grouped},
                     {"bath_bits", b.bath_bits}};
    Json body = {{"n", p.n},
                 {"ell", p.ell},
                 {"m", p.m},
                 {"k", p.k},
                 {"p", number_to_json(p.p)},
                 {"beta", number_to_json(p.beta)},
                 {"q", number_to_json(p.q)},
                 {"width", number_to_json(p.width)},
                 {"rate_limit", number_to_json(p.rate_limit)},
                 {"cost_rate", number_to_json(p.cost_rate)},
                 {"formation_rate", number_to_json(p.formation_rate)},
                 {"m_nominal", p.m_nominal},
                 {"ell_min", p.ell_min},
                 {"register_bits", p.register_bits},
                 {"exact_counting", p.exact_counting},
                 {"free_target", p.free_target},
                 {"bath_window", range(p.bath_window)},
                 {"target_window", range(p.target_window)},
                 {"bath_mass", number_to_json(p.bath_mass)},
                 {"target_mass", number_to_json(p.target_mass)},
                 {"failure_mass", number_to_json(p.failure_mass)},
                 {"binding_type", pair_json(p.binding_type)},
                 {"entropy_cost", number_to_json(p.entropy_cost)},
                 {"target_distribution", numbers(p.target_distribution)},
                 {"birkhoff", birkhoff},
                 {"records", records},
                 {"records_elided", p.records_elided},
                 {"record_count", p.record_count}};
    Json units = {{"n", kCount},
                  {"ell", kCount},
                  {"m", kCount},
                  {"k", kCount},
                  {"p", kProbability},
                  {"beta", "inverse energy (1/E0)"},
                  {"q", kProbability},
                  {"width", "standard deviations (sqrt n)"},
                  {"rate_limit", kDimensionless},
                  {"cost_rate", "excited qubits per target copy"},
                  {"formation_rate", "target copies per excited qubit"},
                  {"register_bits", "bits"},
                  {"bath_mass", kProbability},
                  {"target_mass", kProbability},
                  {"failure_mass", kProbability},
                  {"entropy_cost", kNats},
                  {"target_distribution", kProbability},
                  {"birkhoff.class_weights", kProbability},
                  {"birkhoff.target_weights", kProbability},
                  {"birkhoff.achieved_weights", kProbability},
                  {"birkhoff.max_deviation", kProbability},
                  {"birkhoff.total_deviation", kProbability},
                  {"birkhoff.bath_bits", "bits"},
                  {"records.log_input_count", kNats},
                  {"records.log_output_count", kNats}};
    return envelope("formation_plan", std::move(body), std::move(units));
}

FormationPlan formation_plan_from_json(const Json& j) {
    check_envelope(j, "formation_plan");
    FormationPlan p;
    p.n = j.at("n").get<Count>();
    p.ell = j.at("ell").get<Count>();
    p.m = j.at("m").get<Count>();
    p.k = j.at("k").get<Count>();
    p.p = number_from_json(j.at("p"));
    p.beta = number_from_json(j.at("beta"));
    p.q = number_from_json(j.at("q"));
    p.width = number_from_json(j.at("width"));
    p.rate_limit = number_from_json(j.at("rate_limit"));
    p.cost_rate = number_from_json(j.at("cost_rate"));
    p.formation_rate = number_from_json(j.at("formation_rate"));
    p.m_nominal = j.at("m_nominal").get<Count>();
    p.ell_min = j.at("ell_min").get<Count>();
    p.register_bits = j.at("register_bits").get<int>();
    p.exact_counting = j.at("exact_counting").get<bool>();
    p.free_target = j.at("free_target").get<bool>();
    p.bath_window = range_from(j.at("bath_window"));
    p.target_window = range_from(j.at("target_window"));
    p.bath_mass = number_from_json(j.at("bath_mass"));
    p.target_mass = number_from_json(j.at("target_mass"));
    p.failure_mass = number_from_json(j.at("failure_mass"));
    p.binding_type = pair_from(j.at("binding_type"));
    p.entropy_cost = number_from_json(j.at("entropy_cost"));
    p.target_distribution = numbers_from(j.at("target_distribution"));
    const Json& b = j.at("birkhoff");
    auto& bp = p.birkhoff;
    bp.sets = b.at("sets").get<std::vector<std::vector<std::size_t>>>();
    bp.class_counts = b.at("class_counts").get<std::vector<std::vector<std::uint64_t>>>();
    bp.class_weights = numbers_from(b.at("class_weights"));
    bp.class_sizes = b.at("class_sizes").get<std::vector<std::uint64_t>>();
    bp.target_weights = numbers_from(b.at("target_weights"));
    bp.achieved_weights = numbers_from(b.at("achieved_weights"));
    bp.max_deviation = number_from_json(b.at("max_deviation"));
    bp.total_deviation = number_from_json(b.at("total_deviation"));
    bp.tolerance = number_from_json(b.at("tolerance"));
    bp.max_weight = number_from_json(b.at("max_weight"));
    bp.best_effort = b.at("best_effort").get<bool>();
    bp.grouped = b.at("grouped").get<bool>();
    bp.bath_bits = b.at("bath_bits").get<int>();
    for (const auto& r : j.at("records")) {
        FormationRecord rec;
        rec.bath = type_from(r.at("bath"));
        rec.target = type_from(r.at("target"));
        rec.exhaust = type_from(r.at("exhaust"));
        rec.log_input_count = number_from_json(r.at("log_input_count"));
        rec.log_output_count = number_from_json(r.at("log_output_count"));
        rec.input_count = big_from(r.at("input_count"));
        rec.exhaust_count = big_from(r.at("exhaust_count"));
        rec.target_count = big_from(r.at("target_count"));
        rec.exhaust_per_target_min = big_from(r.at("exhaust_per_target_min"));
        rec.exhaust_per_target_max = big_from(r.at("exhaust_per_target_max"));
        p.records.push_back(std::move(rec));
    }
    p.records_elided = j.at("records_elided").get<bool>();
    p.record_count = j.at("record_count").get<std::size_t>();
    return p;
}

Json to_json(const WorkLedger& w) {
    Json body = {{"n", w.n},
                 {"ell", w.ell},
                 {"extracted", number_to_json(w.extracted)},
                 {"per_copy", number_to_json(w.per_copy)},
                 {"limit_per_copy", number_to_json(w.limit_per_copy)},
                 {"per_level_delta", w.per_level_delta},
                 {"feasibility_margin", number_to_json(w.feasibility_margin)},
                 {"asymptotic_margin", number_to_json(w.asymptotic_margin)},
                 {"worst_resource", type(w.worst_resource)},
                 {"worst_bath", type(w.worst_bath)},
                 {"candidates", w.candidates},
                 {"exact", w.exact},
                 {"partial_search", w.partial_search}};
    Json units = {{"extracted", kEnergy},
                  {"per_copy", "energy per copy (units of E0)"},
                  {"limit_per_copy", "energy per copy (units of E0)"},
                  {"per_level_delta", kCount},
                  {"feasibility_margin", kNats},
                  {"asymptotic_margin", kNats}};
    return envelope("work_ledger", std::move(body), std::move(units));
}

Json to_json(const CoherentReport& r) {
    Json terms = Json::array();
    for (const auto& t : r.terms) {
        terms.push_back({{"k", t.k},
                         {"probability", number_to_json(t.probability)},
                         {"mean_energy", number_to_json(t.mean_energy)},
                         {"target_energy", t.target_energy},
                         {"typical_window", Json::array({t.typical_lo, t.typical_hi})},
                         {"tail", number_to_json(t.tail)},
                         {"max_err_norm", number_to_json(t.max_err_norm)},
                         {"nu1_residual", number_to_json(t.nu1_residual)},
                         {"nu2_norm", number_to_json(t.nu2_norm)},
                         {"nu3_norm", number_to_json(t.nu3_norm)}});
    }
    auto opt = [](const std::optional<double>& x) { return x ? number_to_json(*x) : Json(nullptr); };
    Json body = {{"n", r.n},
                 {"window_size", r.window_size},
                 {"typical_k", Json::array({r.typical_k_lo, r.typical_k_hi})},
                 {"atypical_mass", number_to_json(r.atypical_mass)},
                 {"terms", terms},
                 {"worst_tail", number_to_json(r.worst_tail)},
                 {"worst_err_norm", number_to_json(r.worst_err_norm)},
                 {"vector_bound", number_to_json(r.vector_bound)},
                 {"analytic_bound", number_to_json(r.analytic_bound)},
                 {"exact", r.exact},
                 {"trace_distance", opt(r.trace_distance)},
                 {"catalyst_fidelity", opt(r.catalyst_fidelity)},
                 {"max_vector_distance", opt(r.max_vector_distance)}};
    Json units = {{"window_size", "frame energy levels"},
                  {"atypical_mass", kProbability},
                  {"terms.mean_energy", kEnergy},
                  {"terms.target_energy", kEnergy},
                  {"terms.typical_window", kEnergy},
                  {"terms.tail", kProbability},
                  {"terms.max_err_norm", "vector norm"},
                  {"terms.nu1_residual", "vector norm"},
                  {"terms.nu2_norm", "vector norm"},
                  {"terms.nu3_norm", "vector norm"},
                  {"vector_bound", "vector norm"},
                  {"analytic_bound", "trace distance"},
                  {"trace_distance", "trace distance"},
                  {"catalyst_fidelity", kDimensionless},
                  {"max_vector_distance", "vector norm"}};
    return envelope("coherent_report", std::move(body), std::move(units));
}

Json to_json(const QuantumReport& r) {
    Json body = {{"total_qubits", r.total_qubits},
                 {"m", r.m},
                 {"commutes", r.commutes},
                 {"bijective", r.bijective},
                 {"trace_preserving", r.trace_preserving},
                 {"output_trace", number_to_json(r.output_trace)},
                 {"rotation_unitarity_error", number_to_json(r.rotation_unitarity_error)},
                 {"work_trace_distance", number_to_json(r.work_trace_distance)},
                 {"work_error_bound", number_to_json(r.work_error_bound)},
                 {"failure_mass", number_to_json(r.failure_mass)},
                 {"within_bound", r.within_bound}};
    Json units = {{"output_trace", kDimensionless},
                  {"rotation_unitarity_error", kDimensionless},
                  {"work_trace_distance", "trace distance"},
                  {"work_error_bound", "trace distance"},
                  {"failure_mass", kProbability}};
    return envelope("quantum_report", std::move(body), std::move(units));
}

Json to_json(const ExhaustReport& r) {
    Json states = Json::array();
    for (const auto& s : r.reduced_states) states.push_back(matrix_json(s.matrix()));
    Json body = {{"block_size", r.block_size},
                 {"exhaust_length", r.exhaust_length},
                 {"reduced_states", states},
                 {"rel_entropies", numbers(r.rel_entropies)},
                 {"pinsker_bounds", numbers(r.pinsker_bounds)},
                 {"measured_trace_norms", numbers(r.measured_trace_norms)},
                 {"total_rel_entropy", number_to_json(r.total_rel_entropy)},
                 {"per_system_rel_entropy", number_to_json(r.per_system_rel_entropy)},
                 {"subadditive", r.subadditive},
                 {"pinsker_holds", r.pinsker_holds}};
    Json units = {{"block_size", "systems"},
                  {"exhaust_length", "systems"},
                  {"rel_entropies", kNats},
                  {"pinsker_bounds", "trace norm"},
                  {"measured_trace_norms", "trace norm"},
                  {"total_rel_entropy", kNats},
                  {"per_system_rel_entropy", "nats per system"}};
    return envelope("exhaust_report", std::move(body), std::move(units));
}

Json to_json(const WorkLedgerAudit& a) {
    Json body = {{"trajectories", a.trajectories},
                 {"balanced", a.balanced},
                 {"max_imbalance", a.max_imbalance},
                 {"expected_work", number_to_json(a.expected_work)}};
    Json units = {{"max_imbalance", kEnergy}, {"expected_work", kEnergy}};
    return envelope("work_audit", std::move(body), std::move(units));
}

Json to_json(const ContinuityReport& r) {
    Json body = {{"holds", r.holds},
                 {"lhs", number_to_json(r.lhs)},
                 {"trace_norm", number_to_json(r.trace_norm)},
                 {"log_d", number_to_json(r.log_d)},
                 {"rhs", number_to_json(r.rhs)},
                 {"m", number_to_json(r.m)},
                 {"c", number_to_json(r.c)}};
    Json units = {{"lhs", kNats}, {"trace_norm", kDimensionless}, {"log_d", kNats}, {"rhs", kNats},
                  {"m", kDimensionless}, {"c", kNats}};
    return envelope("continuity_report", std::move(body), std::move(units));
}

Json to_json(const ClassicalExecution& run) {
    Json body = {{"input_length", run.input_length},
                 {"work_length", run.work_length},
                 {"support_size", run.output.strings.size()},
                 {"success_probability", number_to_json(run.success_probability)},
                 {"exact_success", run.exact_success ? Json(run.exact_success->get_str()) : Json(nullptr)},
                 {"uncovered_mass", number_to_json(run.uncovered_mass)},
                 {"ones_conserved", run.ones_conserved},
                 {"injective", run.injective},
                 {"rational", run.output.rational()},
                 {"target_ones_distribution", numbers(run.target_ones_distribution)}};
    Json units = {{"input_length", "symbols"},
                  {"work_length", "symbols"},
                  {"success_probability", kProbability},
                  {"exact_success", "probability (exact fraction)"},
                  {"uncovered_mass", kProbability},
                  {"target_ones_distribution", kProbability}};
    return envelope("classical_execution", std::move(body), std::move(units));
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "# schema_version: " + std::to_string(kSchemaVersion) + "\n" + kSweepHeader + "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.ell) + "," + std::to_string(r.m) + "," + shortest(r.rate) +
               "," + shortest(r.deficit) + "," + shortest(r.failure_mass) + "\n";
    }
    return out;
}

std::vector<SweepRow> sweep_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    require(std::getline(is, line) && line == "# schema_version: " + std::to_string(kSchemaVersion),
            ErrorCode::InvalidParameter, "sweep CSV lacks the schema_version line");
    require(std::getline(is, line) && line == kSweepHeader, ErrorCode::InvalidParameter, "unexpected sweep CSV header");
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        require(cells.size() == 6, ErrorCode::InvalidParameter, "sweep rows need six cells");
        rows.push_back({std::stoll(cells[0]), std::stoll(cells[1]), std::stoll(cells[2]), parse_double(cells[3]),
                        parse_double(cells[4]), parse_double(cells[5])});
    }
    return rows;
}

std::string distribution_to_csv(const StringDistribution& d) {
    std::string out = "# schema_version: " + std::to_string(kSchemaVersion) + "\nstring,numerator,denominator\n";
    for (std::size_t i = 0; i < d.strings.size(); ++i) {
        const mpq_class w = d.rational() ? d.exact[i] : mpq_class(d.probs[i]);
        out += to_bitstring(d.strings[i], d.length) + "," + w.get_num().get_str() + "," + w.get_den().get_str() + "\n";
    }
    return out;
}

StringDistribution distribution_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    require(std::getline(is, line) && line == "# schema_version: " + std::to_string(kSchemaVersion),
            ErrorCode::InvalidParameter, "distribution CSV lacks the schema_version line");
    require(std::getline(is, line) && line == "string,numerator,denominator", ErrorCode::InvalidParameter,
            "unexpected distribution CSV header");
    StringDistribution d;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        require(cells.size() == 3, ErrorCode::InvalidParameter, "distribution rows need three cells");
        const int len = static_cast<int>(cells[0].size());
        require(first || len == d.length, ErrorCode::InvalidParameter, "strings differ in length");
        d.length = len;
        first = false;
        mpq_class w{mpz_class{cells[1]}, mpz_class{cells[2]}};
        w.canonicalize();
        d.strings.push_back(from_bitstring(cells[0]));
        d.probs.push_back(w.get_d());
        d.exact.push_back(std::move(w));
    }
    return d;
}

}  // namespace athermal
