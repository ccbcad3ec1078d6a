#pragma once

// JSON reports and CSV grids. Every document carries schema_version and a
// units table; non-finite numbers are written as the strings "inf", "-inf", "nan".

#include <string>
#include <vector>

#include <json.hpp>

#include "athermal/coherent.hpp"
#include "athermal/core.hpp"
#include "athermal/distill.hpp"
#include "athermal/form.hpp"
#include "athermal/multilevel.hpp"
#include "athermal/simulate.hpp"

namespace athermal {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json number_to_json(double x);
double number_from_json(const Json& j);

Json to_json(const DistillationPlan& plan);
DistillationPlan distillation_plan_from_json(const Json& j);
Json to_json(const FormationPlan& plan);
FormationPlan formation_plan_from_json(const Json& j);

Json to_json(const WorkLedger& ledger);
Json to_json(const CoherentReport& report);
Json to_json(const QuantumReport& report);
Json to_json(const ExhaustReport& report);
Json to_json(const WorkLedgerAudit& audit);
Json to_json(const ContinuityReport& report);
/// Summary of a classical run; the output distribution goes to CSV.
Json to_json(const ClassicalExecution& run);

/// Two-space indented text with a trailing newline.
std::string dump(const Json& j);

struct SweepRow {
    Count n = 0;
    Count ell = 0;
    Count m = 0;
    double rate = 0.0;     // m / n
    double deficit = 0.0;  // rate limit - rate
    double failure_mass = 0.0;
};

inline constexpr const char* kSweepHeader = "n,ell,m,rate,deficit,failure_mass";

/// "# schema_version: 1", the header, then one row per entry (shortest round-trip decimals).
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(const std::string& text);

/// string,numerator,denominator; floating probabilities are written as their exact binary fractions.
std::string distribution_to_csv(const StringDistribution& dist);
StringDistribution distribution_from_csv(const std::string& text);

}  // namespace athermal
