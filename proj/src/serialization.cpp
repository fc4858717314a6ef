#include "morl/serialization.hpp"

#include <cstdio>
#include <fstream>

namespace morl {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

} // namespace

json policy_to_json(const TabularPolicy &p) {
    return {{"num_states", p.num_states()}, {"num_actions", p.num_actions()}, {"q_table", as_vector(p.values())}};
}

TabularPolicy policy_from_json(const json &j) {
    return TabularPolicy(j.at("num_states").get<std::size_t>(), j.at("num_actions").get<std::size_t>(),
                         j.at("q_table").get<std::vector<double>>());
}

json ccs_to_json(const CcsStore &ccs) {
    json entries = json::array();
    for (const auto &e : ccs.entries()) {
        json je = policy_to_json(e.policy);
        je["preference"] = as_vector(e.preference.weights());
        je["robustness"] = e.robustness;
        entries.push_back(std::move(je));
    }
    return {{"phi", ccs.phi()}, {"distance", to_string(ccs.distance_kind())}, {"entries", std::move(entries)}};
}

json coverage_set_to_json(const CoverageSet &cs) {
    json entries = json::array();
    for (const auto &e : cs.entries) {
        json je;
        je["preference"] = as_vector(e.preference.weights());
        je["value_vector"] = as_vector(e.value_vector.components());
        if (cs.algorithm == CoverageAlgorithm::ols) {
            je.update(policy_to_json(e.tables.front()));
        } else {
            json tables = json::array();
            for (const auto &t : e.tables) tables.push_back(policy_to_json(t));
            je["objective_q_tables"] = std::move(tables);
        }
        entries.push_back(std::move(je));
    }
    return {{"algorithm", to_string(cs.algorithm)}, {"entries", std::move(entries)}};
}

CoverageSet coverage_set_from_json(const json &j) {
    try {
        CoverageSet cs;
        const auto algo = j.at("algorithm").get<std::string>();
        if (algo == "ols")
            cs.algorithm = CoverageAlgorithm::ols;
        else if (algo == "tlo")
            cs.algorithm = CoverageAlgorithm::tlo;
        else
            throw config_error("unknown coverage-set algorithm '" + algo + "'");
        for (const auto &je : j.at("entries")) {
            std::vector<TabularPolicy> tables;
            if (cs.algorithm == CoverageAlgorithm::ols)
                tables.push_back(policy_from_json(je));
            else
                for (const auto &t : je.at("objective_q_tables")) tables.push_back(policy_from_json(t));
            cs.entries.push_back({Preference(je.at("preference").get<std::vector<double>>()), std::move(tables),
                                  RewardVector(je.at("value_vector").get<std::vector<double>>())});
        }
        return cs;
    } catch (const json::exception &e) {
        throw config_error(std::string("malformed coverage set: ") + e.what());
    } catch (const contract_error &e) {
        throw config_error(std::string("invalid coverage set: ") + e.what());
    }
}

const CoverageSet &CoverageBundle::for_run(std::size_t run, std::uint64_t layout_hash) const {
    for (const auto &r : runs) {
        if (r.run != run) continue;
        if (r.layout_hash != layout_hash)
            throw config_error("coverage set for run " + std::to_string(run) + " was trained on a different layout");
        return r.set;
    }
    throw config_error("coverage set file has no entry for run " + std::to_string(run));
}

json bundle_to_json(const CoverageBundle &b) {
    json runs = json::array();
    for (const auto &r : b.runs)
        runs.push_back({{"run", r.run}, {"layout_hash", hex64(r.layout_hash)}, {"coverage_set", coverage_set_to_json(r.set)}});
    return {{"algorithm", to_string(b.algorithm)}, {"env", to_string(b.env)}, {"runs", std::move(runs)}};
}

CoverageBundle bundle_from_json(const json &j) {
    try {
        CoverageBundle b;
        const auto algo = j.at("algorithm").get<std::string>();
        if (algo != "ols" && algo != "tlo") throw config_error("unknown coverage-set algorithm '" + algo + "'");
        b.algorithm = algo == "ols" ? CoverageAlgorithm::ols : CoverageAlgorithm::tlo;
        b.env = parse_env_kind(j.at("env").get<std::string>());
        for (const auto &r : j.at("runs")) {
            CoverageBundle::RunSet rs;
            rs.run = r.at("run").get<std::size_t>();
            rs.layout_hash = std::stoull(r.at("layout_hash").get<std::string>(), nullptr, 16);
            rs.set = coverage_set_from_json(r.at("coverage_set"));
            if (rs.set.algorithm != b.algorithm) throw config_error("coverage set algorithm mismatch inside bundle");
            b.runs.push_back(std::move(rs));
        }
        return b;
    } catch (const json::exception &e) {
        throw config_error(std::string("malformed coverage-set file: ") + e.what());
    } catch (const std::invalid_argument &) {
        throw config_error("malformed layout hash in coverage-set file");
    }
}

void save_bundle(const CoverageBundle &b, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path.string());
    out << bundle_to_json(b).dump() << '\n';
}

CoverageBundle load_bundle(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open coverage-set file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw config_error(std::string("coverage-set file is not valid JSON: ") + e.what());
    }
    return bundle_from_json(j);
}

} // namespace morl
