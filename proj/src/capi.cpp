// C surface of the shared library: exception-to-status translation, opaque
// report handles, and string marshalling.
#include "doflab/doflab.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/ais_counter.hpp"
#include "core/config_io.hpp"
#include "core/dof_region.hpp"
#include "core/entropy_lab.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class F>
doflab_status guarded(F&& f) {
    try {
        f();
        return DOFLAB_OK;
    } catch (const doflab::BudgetError& e) {
        g_last_error = e.what();
        return DOFLAB_EBUDGET;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return DOFLAB_EINVAL;
    } catch (const std::domain_error& e) {
        g_last_error = e.what();
        return DOFLAB_EINVAL;
    } catch (const std::out_of_range& e) {
        g_last_error = e.what();
        return DOFLAB_EINVAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DOFLAB_ERUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return DOFLAB_ERUNTIME;
    }
}

std::vector<doflab::Rat> parse_list(const std::string& csv) {
    std::vector<doflab::Rat> out;
    size_t start = 0;
    while (start <= csv.size()) {
        size_t end = csv.find(',', start);
        if (end == std::string::npos) end = csv.size();
        const std::string item = csv.substr(start, end - start);
        if (!item.empty()) out.push_back(doflab::parse_rational(item));
        if (end == csv.size()) break;
        start = end + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty rational list");
    return out;
}

}  // namespace

struct doflab_report {
    int verdict = 3;
    std::string json;
    std::string csv;
};

extern "C" {

const char* doflab_version(void) { return "1.0.0"; }

const char* doflab_last_error(void) { return g_last_error.c_str(); }

void doflab_string_free(char* s) { std::free(s); }

doflab_status doflab_beta_o(int M, int N1, int N2, const char* beta1, const char* beta2,
                            char** out) {
    return guarded([&] {
        if (!beta1 || !beta2 || !out) throw std::invalid_argument("null argument");
        const auto cfg = doflab::normalize_config(M, N1, N2, doflab::parse_rational(beta1),
                                                  doflab::parse_rational(beta2));
        const doflab::Rat b =
            doflab::beta_o(cfg.M, cfg.N1, cfg.N2, cfg.beta1, cfg.beta2);
        *out = dup_string(doflab::rat_string(b));
    });
}

doflab_status doflab_region_json(int M, int N1, int N2, const char* beta1,
                                 const char* beta2, char** out) {
    return guarded([&] {
        if (!beta1 || !beta2 || !out) throw std::invalid_argument("null argument");
        const auto r = doflab::region(doflab::normalize_config(
            M, N1, N2, doflab::parse_rational(beta1), doflab::parse_rational(beta2)));
        *out = dup_string(doflab::region_json(r));
    });
}

doflab_status doflab_region_csv(int M, int N1, int N2, const char* beta1,
                                const char* beta2, char** out) {
    return guarded([&] {
        if (!beta1 || !beta2 || !out) throw std::invalid_argument("null argument");
        const auto r = doflab::region(doflab::normalize_config(
            M, N1, N2, doflab::parse_rational(beta1), doflab::parse_rational(beta2)));
        *out = dup_string(doflab::region_csv(r));
    });
}

doflab_status doflab_sweep_csv(int M, int N1, int N2, const char* beta1_list,
                               const char* beta2_list, char** out) {
    return guarded([&] {
        if (!beta1_list || !beta2_list || !out) throw std::invalid_argument("null argument");
        const auto b1s = parse_list(beta1_list);
        const auto b2s = parse_list(beta2_list);
        std::string csv = "beta1,beta2,sum_dof,branch_agree,vertices\n";
        for (const auto& b1 : b1s) {
            for (const auto& b2 : b2s) {
                const auto cfg = doflab::normalize_config(M, N1, N2, b1, b2);
                const auto r = doflab::region(cfg);
                csv += doflab::rat_string(b1) + "," + doflab::rat_string(b2) + "," +
                       doflab::rat_string(doflab::sum_dof(r)) + ",";
                if (b1 + b2 == 1) {
                    // Compare both branch formulas on the boundary.
                    const doflab::Rat den = doflab::Rat(cfg.N2 - cfg.N1) * (doflab::Rat(1) - cfg.beta1) +
                                            doflab::Rat(cfg.M - cfg.N2) * cfg.beta2;
                    if (den != 0 && cfg.M != cfg.N1) {
                        const doflab::Rat lt =
                            cfg.beta1 * cfg.beta2 * doflab::Rat(cfg.M - cfg.N2) / den;
                        const doflab::Rat ge = (doflab::Rat(cfg.N1 - cfg.N2) +
                                                doflab::Rat(cfg.N2 - cfg.N1) * cfg.beta2 +
                                                doflab::Rat(cfg.M - cfg.N1) * cfg.beta1) /
                                               doflab::Rat(cfg.M - cfg.N1);
                        csv += (lt == ge) ? "true" : "false";
                    } else {
                        csv += "degenerate";
                    }
                }
                csv += ",";
                for (size_t i = 0; i < r.vertices.size(); ++i) {
                    if (i) csv += ";";
                    csv += doflab::rat_string(r.vertices[i].first) + ":" +
                           doflab::rat_string(r.vertices[i].second);
                }
                csv += "\n";
            }
        }
        *out = dup_string(csv);
    });
}

doflab_status doflab_pbar(const char* P, const char* lambda, char** out) {
    return guarded([&] {
        if (!P || !lambda || !out) throw std::invalid_argument("null argument");
        const doflab::PowerScale scale(doflab::parse_rational(P));
        *out = dup_string(scale.pbar(doflab::parse_rational(lambda)).str());
    });
}

doflab_status doflab_verify_run(const char* suite, const char* config_json,
                                uint64_t seed, int threads, doflab_report** out) {
    return guarded([&] {
        if (!suite || !config_json || !out) throw std::invalid_argument("null argument");
        const auto j = nlohmann::json::parse(config_json);
        const doflab::LabConfig lab = doflab::lab_config_from_json(j, seed, threads);
        const std::string name(suite);

        doflab::SweepReport rep;
        if (name == "lemma1" || name == "lemma2" || name == "lemma4" || name == "lemma5") {
            const doflab::BcConfig cfg = doflab::bc_config_from_json(j.at("instance"));
            if (name == "lemma1")
                rep = doflab::verify_lemma_example1(cfg, lab);
            else if (name == "lemma2")
                rep = doflab::verify_lemma_example2(cfg, lab);
            else
                rep = doflab::verify_lemma_general(cfg, name == "lemma4", lab);
        } else if (name == "lemma3") {
            rep = doflab::verify_lemma3(doflab::lemma3_from_json(j), lab);
        } else if (name == "sumset") {
            rep = doflab::verify_sumset(doflab::SumsetInstance::from_json(j), lab);
        } else if (name == "toy") {
            rep = doflab::toy_example_check(doflab::AisConfig::from_json(j), lab);
        } else if (name == "ais") {
            rep = doflab::run_ais_suite(doflab::AisConfig::from_json(j), lab);
        } else {
            throw std::invalid_argument("unknown suite '" + name + "'");
        }

        auto* handle = new doflab_report;
        handle->verdict = rep.verdict;
        handle->json = rep.to_json();
        handle->csv = rep.to_csv();
        *out = handle;
    });
}

int doflab_report_verdict(const doflab_report* rep) { return rep ? rep->verdict : 3; }

const char* doflab_report_json(const doflab_report* rep) {
    return rep ? rep->json.c_str() : "";
}

const char* doflab_report_csv(const doflab_report* rep) {
    return rep ? rep->csv.c_str() : "";
}

void doflab_report_free(doflab_report* rep) { delete rep; }

}  // extern "C"
