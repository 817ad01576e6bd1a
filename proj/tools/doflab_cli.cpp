// doflab command-line front end. Talks to the shared library exclusively
// through the C API.
//
//   doflab region -M 5 -N1 2 -N2 3 -b1 1/2 -b2 2/3 [--format json|csv] [--out F]
//   doflab verify --suite sumset --config fixtures/sumset/example1.json [...]
//   doflab sweep  -M 5 -N1 2 -N2 3 --grid 11 [...]
//
// Exit codes: verify returns 0 (PASS), 1 (FAIL) or 3 (INCONCLUSIVE); any
// invalid flags or configuration exit with 2.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "doflab/doflab.h"

namespace {

// Accept the compact single-dash spellings (-M, -N1, -b1, ...) by mapping
// them onto the canonical long options before parsing.
std::vector<std::string> canonicalize(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        for (const char* flag : {"-M", "-N1", "-N2", "-b1", "-b2"}) {
            if (a == flag) {
                a = std::string("-") + flag;
                break;
            }
        }
        args.push_back(std::move(a));
    }
    return args;
}

int write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "doflab: cannot write " << path << "\n";
        return 2;
    }
    out << text;
    return 0;
}

int fail_with_last_error(const std::string& what) {
    std::cerr << "doflab: " << what << ": " << doflab_last_error() << "\n";
    return 2;
}

uint64_t resolve_seed(bool seed_set, uint64_t seed_flag, const std::string& config_text) {
    if (seed_set) return seed_flag;
    if (const char* env = std::getenv("DOFLAB_SEED")) return std::strtoull(env, nullptr, 10);
    if (!config_text.empty()) {
        // Fall back to a "seed" key in the config, if present.
        auto pos = config_text.find("\"seed\"");
        if (pos != std::string::npos) {
            pos = config_text.find(':', pos);
            if (pos != std::string::npos)
                return std::strtoull(config_text.c_str() + pos + 1, nullptr, 10);
        }
    }
    return 0;
}

int resolve_threads(bool threads_set, int threads_flag) {
    if (threads_set) return threads_flag;
    if (const char* env = std::getenv("DOFLAB_THREADS"))
        return std::max(1, static_cast<int>(std::strtol(env, nullptr, 10)));
    return 1;
}

std::string grid_list(int n) {
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out += ",";
        out += std::to_string(i) + "/" + std::to_string(n - 1);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DoF region calculator and entropy verification lab for the "
                 "two-user MIMO broadcast channel with partial CSIT"};
    app.require_subcommand(1);

    int M = 0, N1 = 0, N2 = 0;
    std::string b1, b2, format = "json", out_path;

    auto* region = app.add_subcommand("region", "compute the DoF region");
    region->add_option("--M", M, "transmit antennas")->required();
    region->add_option("--N1", N1, "receiver 1 antennas")->required();
    region->add_option("--N2", N2, "receiver 2 antennas")->required();
    region->add_option("--b1", b1, "CSIT quality for user 1 (rational)")->required();
    region->add_option("--b2", b2, "CSIT quality for user 2 (rational)")->required();
    region->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    region->add_option("--out", out_path, "output file (default stdout)");

    std::string suite, config_path, verify_format = "json", verify_out;
    uint64_t seed_flag = 0;
    int threads_flag = 1;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite,
                       "lemma1|lemma2|lemma3|lemma4|lemma5|sumset|ais|toy")
        ->required();
    verify->add_option("--config", config_path, "JSON configuration file")->required();
    auto* seed_opt = verify->add_option("--seed", seed_flag, "RNG seed (default 0)");
    auto* threads_opt = verify->add_option("--threads", threads_flag, "worker threads");
    verify->add_option("--format", verify_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    verify->add_option("--out", verify_out, "report file (default stdout)");

    int grid = 0;
    std::string b1_list, b2_list, sweep_out;
    auto* sweep = app.add_subcommand("sweep", "sum-DoF sweep over a beta grid");
    sweep->add_option("--M", M, "transmit antennas")->required();
    sweep->add_option("--N1", N1, "receiver 1 antennas")->required();
    sweep->add_option("--N2", N2, "receiver 2 antennas")->required();
    sweep->add_option("--grid", grid, "uniform NxN grid over [0,1]^2");
    sweep->add_option("--b1-list", b1_list, "comma-separated beta1 values");
    sweep->add_option("--b2-list", b2_list, "comma-separated beta2 values");
    sweep->add_option("--out", sweep_out, "output file (default stdout)");

    auto args = canonicalize(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11's vector parse wants reversed args
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::cerr << "doflab: " << e.what() << "\n";
        return 2;
    }

    if (region->parsed()) {
        char* text = nullptr;
        const doflab_status st =
            format == "csv"
                ? doflab_region_csv(M, N1, N2, b1.c_str(), b2.c_str(), &text)
                : doflab_region_json(M, N1, N2, b1.c_str(), b2.c_str(), &text);
        if (st != DOFLAB_OK) return fail_with_last_error("region");
        const int rc = write_output(text, out_path);
        doflab_string_free(text);
        return rc;
    }

    if (verify->parsed()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "doflab: cannot read config " << config_path << "\n";
            return 2;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string config_text = buffer.str();

        const uint64_t seed = resolve_seed(seed_opt->count() > 0, seed_flag, config_text);
        const int threads = resolve_threads(threads_opt->count() > 0, threads_flag);

        doflab_report* rep = nullptr;
        const doflab_status st =
            doflab_verify_run(suite.c_str(), config_text.c_str(), seed, threads, &rep);
        if (st != DOFLAB_OK) return fail_with_last_error("verify");
        const std::string text =
            verify_format == "csv" ? doflab_report_csv(rep) : doflab_report_json(rep);
        const int verdict = doflab_report_verdict(rep);
        doflab_report_free(rep);
        const int rc = write_output(text, verify_out);
        return rc != 0 ? rc : verdict;
    }

    if (sweep->parsed()) {
        if (grid > 0) {
            b1_list = grid_list(grid);
            b2_list = grid_list(grid);
        }
        if (b1_list.empty() || b2_list.empty()) {
            std::cerr << "doflab: sweep needs --grid or both --b1-list and --b2-list\n";
            return 2;
        }
        char* text = nullptr;
        const doflab_status st =
            doflab_sweep_csv(M, N1, N2, b1_list.c_str(), b2_list.c_str(), &text);
        if (st != DOFLAB_OK) return fail_with_last_error("sweep");
        const int rc = write_output(text, sweep_out);
        doflab_string_free(text);
        return rc;
    }
    return 2;
}
