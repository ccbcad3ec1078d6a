#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "athermal/athermal.h"

namespace {

using Json = nlohmann::json;

enum class Kind { Number, Integer, Text, IntegerList, Flag, JsonFile };

struct FlagSpec {
    std::string flag;
    std::string key;
    Kind kind;
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<FlagSpec> flags;
    bool csv_to_stdout = false;
};

const FlagSpec kBeta{"--beta", "beta", Kind::Number, "inverse temperature (1/E0)"};
const FlagSpec kP{"--p", "p", Kind::Number, "excited-state probability of the resource"};
const FlagSpec kN{"-n,--n", "n", Kind::Integer, "resource copies"};
const FlagSpec kEll{"--ell", "ell", Kind::Integer, "bath qubits (default: automatic)"};
const FlagSpec kWidth{"--width", "width", Kind::Number, "typical window half-width in standard deviations"};
const FlagSpec kExact{"--exact-limit", "exact_limit", Kind::Integer, "largest size counted with exact integers"};
const FlagSpec kState{"--state", "state", Kind::JsonFile, "JSON file with energies, real and imag matrices"};

std::vector<Command> command_table() {
    return {
        {"rate", "asymptotic interconversion rate by both routes",
         {kP, kBeta, {"--target-p", "target_p", Kind::Number, "excited-state probability of the target"}, kState,
          {"--target-level", "target_level", Kind::Integer, "target energy level for --state"}}},
        {"distill", "plan the distillation of excited qubits", {kN, kP, kBeta, kEll, kWidth, kExact, kState}},
        {"form", "plan the formation of resource copies",
         {kN, kP, kBeta, kEll, kWidth, kExact,
          {"--tolerance", "tolerance", Kind::Number, "Birkhoff decomposition tolerance"}}},
        {"sweep", "distillation rate over a grid of n",
         {kP, kBeta, kWidth, kExact, {"--n-grid", "n_grid", Kind::IntegerList, "comma-separated copy counts"},
          {"--threads", "threads", Kind::Integer, "worker threads (default $ATHERMAL_THREADS or 1)"}},
         true},
        {"simulate", "execute a distillation plan on strings or density matrices",
         {kN, kP, kBeta, kEll, kWidth, kExact, kState,
          {"--mode", "mode", Kind::Text, "classical or quantum"},
          {"--rational", "rational", Kind::Flag, "exact rational probabilities"}}},
        {"oracle", "brute-force largest output for one type pair",
         {kEll, {"--gibbs-ones", "gibbs_ones", Kind::Integer, "excitations in the bath"}, kN,
          {"--resource-ones", "resource_ones", Kind::Integer, "excitations in the resource"}}},
        {"exhaust", "relative entropy of the exhaust of a distillation plan",
         {kN, kP, kBeta, kEll, kWidth, kExact, {"--block", "block", Kind::Integer, "block length L"}}},
        {"frame", "reference-frame shift overlap",
         {{"--N", "N", Kind::Integer, "frame window size"}, {"--delta", "delta", Kind::Integer, "energy shift"}}},
        {"coherent", "error of coherent formation with a reference frame",
         {kN, {"--a-re", "a_re", Kind::Number, "Re a"}, {"--a-im", "a_im", Kind::Number, "Im a"},
          {"--b-re", "b_re", Kind::Number, "Re b"}, {"--b-im", "b_im", Kind::Number, "Im b"},
          {"--p", "p", Kind::Number, "weight of the first pure component"},
          {"--exact", "exact", Kind::Flag, "also compute the exact trace distance"}}},
        {"work", "work extractable from many copies of a quasiclassical state",
         {{"--energies", "energies", Kind::Text, "comma-separated energy levels"},
          {"--f-rho", "f_rho", Kind::Text, "comma-separated occupation frequencies"}, kBeta, kN, kEll, kWidth}},
        {"properties", "randomized checks of the monotone properties",
         {{"--seed", "seed", Kind::Integer, "64-bit RNG seed"}, {"--count", "count", Kind::Integer, "instances"},
          {"--max-dim", "max_dim", Kind::Integer, "largest combined dimension"}}},
    };
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stod(item));
    return out;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return Json::parse(in);
}

Json parse_value(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception&) {
        return text;
    }
}

bool write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return static_cast<bool>(std::cout);
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

struct Bound {
    const Command* command = nullptr;
    std::vector<std::string> values;
    std::vector<std::string> set;
    std::string config_file, json_out, csv_out;
    bool quiet = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Athermal conversion of qubit resources: planning, simulation and bounds"};
    app.require_subcommand(1);
    const std::vector<Command> table = command_table();
    std::vector<std::unique_ptr<Bound>> bound;
    std::string roundtrip_in, roundtrip_out;

    for (const auto& cmd : table) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        auto& b = *bound.emplace_back(std::make_unique<Bound>());
        b.command = &cmd;
        b.values.resize(cmd.flags.size());
        for (std::size_t i = 0; i < cmd.flags.size(); ++i) {
            const auto& f = cmd.flags[i];
            if (f.kind == Kind::Flag)
                sub->add_flag_callback(f.flag, [&b, i] { b.values[i] = "true"; }, f.help);
            else
                sub->add_option(f.flag, b.values[i], f.help);
        }
        sub->add_option("--config", b.config_file, "JSON configuration file (flags override it)");
        sub->add_option("--set", b.set, "extra parameter key=value (value parsed as JSON when possible)");
        sub->add_option("--json", b.json_out, "write the JSON report here (default stdout)");
        sub->add_option("--csv", b.csv_out, "write the CSV table here");
        sub->add_flag("-q,--quiet", b.quiet, "suppress the summary line");
    }
    auto* rt = app.add_subcommand("roundtrip", "parse a plan document and serialise it again");
    rt->add_option("input", roundtrip_in, "plan JSON file")->required();
    rt->add_option("-o,--output", roundtrip_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    athermal_result* result = nullptr;
    athermal_status status = ATHERMAL_OK;
    const Bound* active = nullptr;
    try {
        if (rt->parsed()) {
            std::ifstream in(roundtrip_in, std::ios::binary);
            if (!in) {
                std::cerr << "error: cannot open " << roundtrip_in << "\n";
                return 2;
            }
            std::stringstream text;
            text << in.rdbuf();
            status = athermal_roundtrip(text.str().c_str(), &result);
        } else {
            for (std::size_t c = 0; c < table.size(); ++c)
                if (app.get_subcommand(table[c].name)->parsed()) active = bound[c].get();
            Json config = active->config_file.empty() ? Json::object() : read_json_file(active->config_file);
            for (const auto& kv : active->set) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
                config[kv.substr(0, eq)] = parse_value(kv.substr(eq + 1));
            }
            const auto& flags = active->command->flags;
            for (std::size_t i = 0; i < flags.size(); ++i) {
                const std::string& v = active->values[i];
                if (v.empty()) continue;
                const FlagSpec& f = flags[i];
                switch (f.kind) {
                    case Kind::Number:
                        if (f.key == "p" && v == "gibbs") {
                            config["p"] = "gibbs";
                            break;
                        }
                        config[f.key] = std::stod(v);
                        break;
                    case Kind::Integer: config[f.key] = std::stoull(v); break;
                    case Kind::Text:
                        if (f.key == "energies" || f.key == "f_rho")
                            config[f.key] = parse_doubles(v);
                        else
                            config[f.key] = v;
                        break;
                    case Kind::IntegerList: {
                        Json list = Json::array();
                        for (double x : parse_doubles(v)) list.push_back(static_cast<unsigned long long>(x));
                        config[f.key] = list;
                        break;
                    }
                    case Kind::Flag: config[f.key] = true; break;
                    case Kind::JsonFile: config[f.key] = read_json_file(v); break;
                }
            }
            status = athermal_run(active->command->name.c_str(), config.dump().c_str(), &result);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: invalid-parameter: " << e.what() << "\n";
        return 2;
    }

    if (status != ATHERMAL_OK) {
        std::cerr << "error: " << athermal_last_error() << "\n";
        return athermal_exit_code(status);
    }

    bool ok = true;
    if (rt->parsed()) {
        ok = write_text(roundtrip_out, athermal_result_json(result));
    } else {
        const std::string csv = athermal_result_csv(result);
        if (active->command->csv_to_stdout) {
            ok = write_text(active->csv_out, csv);
            if (!active->json_out.empty()) ok = write_text(active->json_out, athermal_result_json(result)) && ok;
        } else {
            ok = write_text(active->json_out, athermal_result_json(result));
            if (!active->csv_out.empty() && !csv.empty()) ok = write_text(active->csv_out, csv) && ok;
        }
        if (!active->quiet) std::cerr << athermal_result_summary(result) << "\n";
    }
    athermal_result_free(result);
    if (!ok) {
        std::cerr << "error: failed to write output\n";
        return 1;
    }
    return 0;
}
