// Copyright (c) 2026 The Floodgate developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floodgate/harness.hpp"
#include "floodgate/policy.hpp"
#include "floodgate/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::filesystem::path resolve_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv("FLOODGATE_OUT_DIR"))
        return std::filesystem::path(dir) / p;
    return p;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    auto full = resolve_out(out_path);
    std::ofstream out(full);
    if (!out) throw floodgate::IoError("cannot write to " + full.string());
    out << text;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    for (char c : csv) {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using namespace floodgate;

    CLI::App app{"floodgate: resource-control policy simulator for P2P gossip networks"};
    app.require_subcommand(1);

    // run
    std::string run_file, run_out, run_format = "tabular", run_trace;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    auto* run_cmd = app.add_subcommand("run", "run one scenario and emit its report");
    run_cmd->add_option("scenario", run_file, "scenario file")->required();
    run_cmd->add_option("--seed", run_seed, "override the scenario seed")
        ->each([&](const std::string&) { run_seed_set = true; });
    run_cmd->add_option("--out", run_out, "write the report to this file");
    run_cmd->add_option("--format", run_format, "structured | tabular");
    run_cmd->add_option("--trace", run_trace, "also write the event trace to this file");

    // compare
    std::string cmp_file, cmp_policies, cmp_out, cmp_format = "tabular";
    std::uint64_t cmp_seed = 0;
    bool cmp_seed_set = false;
    auto* cmp_cmd =
        app.add_subcommand("compare", "run a template once per policy, emit the matrix");
    cmp_cmd->add_option("template", cmp_file, "scenario template file")->required();
    cmp_cmd->add_option("--policies", cmp_policies, "comma-separated policy list")
        ->required();
    cmp_cmd->add_option("--seed", cmp_seed, "override the template seed")
        ->each([&](const std::string&) { cmp_seed_set = true; });
    cmp_cmd->add_option("--out", cmp_out, "write the matrix to this file");
    cmp_cmd->add_option("--format", cmp_format, "structured | tabular");

    // solve-pow
    std::string pow_payload;
    std::uint64_t pow_difficulty = 1;
    auto* pow_cmd = app.add_subcommand("solve-pow", "find a hashcash nonce for a payload");
    pow_cmd->add_option("payload", pow_payload, "payload as hex")->required();
    pow_cmd->add_option("--difficulty", pow_difficulty, "difficulty d >= 1")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            Scenario sc = load_scenario(run_file);
            if (run_seed_set) sc.seed = run_seed;
            auto format = report_format_from_string(run_format);
            if (!format) throw ValidationError("format", "unknown report format");
            RunResult result = run_scenario(sc);
            write_output(report_to_string(result.report, *format), run_out);
            if (!run_trace.empty()) write_output(result.trace_text, run_trace);
            return kExitOk;
        }
        if (*cmp_cmd) {
            Scenario sc = load_scenario(cmp_file);
            if (cmp_seed_set) sc.seed = cmp_seed;
            auto format = report_format_from_string(cmp_format);
            if (!format) throw ValidationError("format", "unknown report format");
            auto policies = split_csv(cmp_policies);
            if (policies.empty())
                throw ValidationError("policies", "at least one policy required");
            ComparisonMatrix matrix = compare_policies(sc, policies);
            write_output(matrix_to_string(matrix, *format), cmp_out);
            return kExitOk;
        }
        if (*pow_cmd) {
            auto payload = from_hex(pow_payload);
            if (!payload) throw ValidationError("payload", "not valid hex");
            if (pow_difficulty < 1)
                throw ValidationError("difficulty", "must be at least 1");
            std::uint64_t nonce = hashcash_solve(*payload, pow_difficulty);
            Digest digest = hashcash::pow_digest(*payload, pow_difficulty, nonce);
            std::cout << "nonce " << nonce << "\n";
            std::cout << "digest " << digest.hex() << "\n";
            return kExitOk;
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
