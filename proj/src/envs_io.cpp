#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "morl/envs.hpp"

#ifndef MORL_DATA_DIR
#define MORL_DATA_DIR "."
#endif

namespace morl {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json &j, const std::set<std::string> &known, const char *where) {
    for (const auto &[key, _] : j.items())
        if (!known.contains(key)) throw config_error(std::string("unknown key '") + key + "' in " + where);
}

} // namespace

EnvConfig layout_from_json_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw config_error(std::string("layout is not valid JSON: ") + e.what());
    }
    try {
        reject_unknown_keys(j, {"kind", "width", "height", "objects", "victim_death_range", "attack_probability",
                                "step_cap", "seed"},
                            "layout");
        EnvConfig c;
        c.kind = parse_env_kind(j.at("kind").get<std::string>());
        c.width = j.at("width").get<int>();
        c.height = j.at("height").get<int>();
        for (const auto &o : j.at("objects")) {
            reject_unknown_keys(o, {"type", "x", "y", "value"}, "layout object");
            const auto type = o.at("type").get<std::string>();
            GridPosition p{o.at("x").get<int>(), o.at("y").get<int>()};
            if (type == "home") {
                if (c.home) throw config_error("layout has more than one home cell");
                c.home = p;
                continue;
            }
            c.objects.push_back({parse_object_kind(type), p, o.value("value", 0.0)});
        }
        if (j.contains("victim_death_range")) {
            const auto &r = j.at("victim_death_range");
            c.victim_death_range = std::pair{r.at(0).get<int>(), r.at(1).get<int>()};
        }
        c.attack_probability = j.value("attack_probability", 0.10);
        c.step_cap = j.value("step_cap", default_step_cap(c.kind));
        c.seed = j.value("seed", std::uint64_t{0});
        validate(c);
        return c;
    } catch (const json::exception &e) {
        throw config_error(std::string("malformed layout: ") + e.what());
    }
}

std::string layout_to_json_text(const EnvConfig &c) {
    json objects = json::array();
    for (const auto &o : c.objects) {
        json jo{{"type", to_string(o.kind)}, {"x", o.pos.x}, {"y", o.pos.y}};
        if (o.kind == ObjectKind::treasure) jo["value"] = o.value;
        objects.push_back(jo);
    }
    if (c.home) objects.push_back({{"type", "home"}, {"x", c.home->x}, {"y", c.home->y}});
    json j{{"kind", to_string(c.kind)}, {"width", c.width}, {"height", c.height}, {"objects", objects},
           {"step_cap", c.step_cap}, {"seed", c.seed}};
    if (c.victim_death_range) j["victim_death_range"] = {c.victim_death_range->first, c.victim_death_range->second};
    if (c.kind == EnvKind::rg) j["attack_probability"] = c.attack_probability;
    return j.dump(2);
}

EnvConfig load_layout(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open layout " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return layout_from_json_text(ss.str());
}

std::filesystem::path layout_dir() {
    if (const char *dir = std::getenv("MORL_LAYOUT_DIR")) return dir;
    return std::filesystem::path(MORL_DATA_DIR) / "layouts";
}

std::filesystem::path default_layout_path(EnvKind kind) {
    return layout_dir() / (std::string(to_string(kind)) + ".json");
}

EnvConfig default_layout(EnvKind kind) { return load_layout(default_layout_path(kind)); }

} // namespace morl
