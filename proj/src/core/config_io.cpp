#include "core/config_io.hpp"

namespace doflab {

BcConfig bc_config_from_json(const nlohmann::json& j) {
    BcConfig cfg = normalize_config(j.at("M").get<int>(), j.at("N1").get<int>(),
                                    j.at("N2").get<int>(),
                                    parse_rational(j.at("beta1").get<std::string>()),
                                    parse_rational(j.at("beta2").get<std::string>()));
    cfg.delta = j.value("delta", 1.0);
    cfg.epsilon = j.value("epsilon", 1e-3);
    cfg.f_max = j.value("f_max", 1.0);
    cfg.seed = j.value("seed", 0ull);
    return cfg;
}

nlohmann::ordered_json bc_config_to_json(const BcConfig& cfg) {
    nlohmann::ordered_json j;
    j["M"] = cfg.M_original;
    j["N1"] = cfg.N1;
    j["N2"] = cfg.N2;
    j["beta1"] = rat_string(cfg.beta1);
    j["beta2"] = rat_string(cfg.beta2);
    j["delta"] = cfg.delta;
    j["epsilon"] = cfg.epsilon;
    j["f_max"] = cfg.f_max;
    j["seed"] = cfg.seed;
    return j;
}

LabConfig lab_config_from_json(const nlohmann::json& j, uint64_t seed, int threads) {
    LabConfig lab;
    lab.seed = seed;
    lab.threads = std::max(1, threads);
    if (j.contains("P_sweep")) {
        lab.p_sweep.clear();
        for (const auto& p : j.at("P_sweep")) lab.p_sweep.push_back(p.get<long long>());
    }
    lab.draws = j.value("draws", lab.draws);
    lab.tau = j.value("tau", lab.tau);
    lab.budget_bits = j.value("budget_bits", lab.budget_bits);
    lab.labels = j.value("labels", lab.labels);
    if (lab.draws < 1 || lab.budget_bits < 1 || lab.labels < 1 || lab.p_sweep.empty())
        throw std::invalid_argument("lab config: budgets must be positive");
    return lab;
}

Lemma3Config lemma3_from_json(const nlohmann::json& j) {
    Lemma3Config cfg;
    if (j.contains("eta")) cfg.eta = parse_rational(j.at("eta").get<std::string>());
    cfg.N1 = j.at("N1").get<int>();
    cfg.N2 = j.at("N2").get<int>();
    for (const auto& bj : j.at("blocks")) {
        Lemma3Config::Block b;
        b.size = bj.at("size").get<int>();
        b.lambda1 = parse_rational(bj.at("lambda1").get<std::string>());
        b.lambda2 = parse_rational(bj.at("lambda2").get<std::string>());
        cfg.blocks.push_back(b);
    }
    cfg.share_draws = j.value("share_draws", false);
    cfg.delta = j.value("delta", 1.0);
    cfg.f_max = j.value("f_max", 1.0);
    return cfg;
}

}  // namespace doflab
