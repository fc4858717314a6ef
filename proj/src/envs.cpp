#include "morl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace morl {

std::string_view to_string(EnvKind k) {
    switch (k) {
    case EnvKind::sar: return "sar";
    case EnvKind::dst: return "dst";
    case EnvKind::rg: return "rg";
    }
    return "?";
}

std::string_view to_string(ObjectKind k) {
    switch (k) {
    case ObjectKind::fire: return "fire";
    case ObjectKind::obstacle: return "obstacle";
    case ObjectKind::victim: return "victim";
    case ObjectKind::treasure: return "treasure";
    case ObjectKind::gold: return "gold";
    case ObjectKind::gem: return "gem";
    case ObjectKind::enemy: return "enemy";
    }
    return "?";
}

EnvKind parse_env_kind(std::string_view s) {
    for (auto k : {EnvKind::sar, EnvKind::dst, EnvKind::rg})
        if (to_string(k) == s) return k;
    throw config_error("unknown environment kind '" + std::string(s) + "'");
}

ObjectKind parse_object_kind(std::string_view s) {
    for (auto k : {ObjectKind::fire, ObjectKind::obstacle, ObjectKind::victim, ObjectKind::treasure,
                   ObjectKind::gold, ObjectKind::gem, ObjectKind::enemy})
        if (to_string(k) == s) return k;
    throw config_error("unknown object type '" + std::string(s) + "'");
}

std::pair<int, int> grid_dims(EnvKind kind) {
    switch (kind) {
    case EnvKind::sar: return {9, 9};
    case EnvKind::dst: return {10, 11};
    case EnvKind::rg: return {5, 5};
    }
    throw contract_error("unknown environment kind");
}

int default_step_cap(EnvKind kind) {
    switch (kind) {
    case EnvKind::sar: return 500;
    case EnvKind::dst: return 200;
    case EnvKind::rg: return 100;
    }
    throw contract_error("unknown environment kind");
}

namespace {

bool allowed_in(EnvKind env, ObjectKind obj) {
    switch (env) {
    case EnvKind::sar: return obj == ObjectKind::fire || obj == ObjectKind::obstacle || obj == ObjectKind::victim;
    case EnvKind::dst: return obj == ObjectKind::treasure;
    case EnvKind::rg: return obj == ObjectKind::gold || obj == ObjectKind::gem || obj == ObjectKind::enemy;
    }
    return false;
}

std::size_t cell_index(GridPosition p, int width) {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(p.x);
}

// Cells holding an object or the RG home.
std::vector<bool> occupancy(const EnvConfig &config) {
    std::vector<bool> used(static_cast<std::size_t>(config.width * config.height), false);
    for (const auto &o : config.objects) used[cell_index(o.pos, config.width)] = true;
    if (config.home) used[cell_index(*config.home, config.width)] = true;
    return used;
}

} // namespace

void validate(const EnvConfig &config) {
    const auto [w, h] = grid_dims(config.kind);
    if (config.width != w || config.height != h)
        throw config_error(std::string(to_string(config.kind)) + " grid must be " + std::to_string(w) + "x" +
                           std::to_string(h));
    if (config.step_cap <= 0) throw config_error("step cap must be positive");
    if (!(config.attack_probability >= 0.0 && config.attack_probability <= 1.0))
        throw config_error("attack probability outside [0,1]");

    auto in_grid = [&](GridPosition p) { return p.x >= 0 && p.x < w && p.y >= 0 && p.y < h; };
    std::vector<bool> used(static_cast<std::size_t>(w * h), false);
    auto claim = [&](GridPosition p) {
        if (!in_grid(p)) throw config_error("object outside the grid");
        auto idx = cell_index(p, w);
        if (used[idx]) throw config_error("two objects share a cell");
        used[idx] = true;
    };
    for (const auto &o : config.objects) {
        if (!allowed_in(config.kind, o.kind))
            throw config_error(std::string(to_string(o.kind)) + " not allowed in " + std::string(to_string(config.kind)));
        if (o.kind == ObjectKind::treasure && !(o.value > 0.0 && std::isfinite(o.value)))
            throw config_error("treasure values must be positive");
        claim(o.pos);
    }
    if (config.kind == EnvKind::rg) {
        if (!config.home) throw config_error("rg layout needs a home cell");
        claim(*config.home);
    } else if (config.home) {
        throw config_error("home cell is only meaningful for rg");
    }
    if (config.victim_death_range) {
        auto [lo, hi] = *config.victim_death_range;
        if (lo < 1 || hi < lo) throw config_error("victim death range must satisfy 1 <= lo <= hi");
    }
}

std::uint64_t layout_hash(const EnvConfig &config) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(config.kind));
    for (const auto &o : config.objects) {
        mix(static_cast<std::uint64_t>(o.kind));
        mix(static_cast<std::uint64_t>(o.pos.x));
        mix(static_cast<std::uint64_t>(o.pos.y));
        mix(static_cast<std::uint64_t>(std::llround(o.value * 1e6)));
    }
    if (config.home) {
        mix(static_cast<std::uint64_t>(config.home->x));
        mix(static_cast<std::uint64_t>(config.home->y));
    }
    return h;
}

EnvConfig perturb(const EnvConfig &config, double fraction, std::uint64_t perturb_seed) {
    require(fraction >= 0.0 && fraction <= 1.0, "perturb fraction outside [0,1]");
    EnvConfig out = config;
    const std::size_t k = out.objects.size();
    const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(k) + 1e-12));
    if (count == 0) return out;

    std::mt19937_64 rng(perturb_seed);
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    // partial Fisher-Yates: first `count` entries are a uniform sample without replacement
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, k - 1);
        std::swap(order[i], order[pick(rng)]);
    }

    auto used = occupancy(out);
    for (std::size_t i = 0; i < count; ++i) {
        auto &obj = out.objects[order[i]];
        std::vector<std::size_t> free_cells;
        for (std::size_t c = 0; c < used.size(); ++c)
            if (!used[c]) free_cells.push_back(c);
        if (free_cells.empty()) throw config_error("no free cell to relocate an object");
        std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
        const std::size_t cell = free_cells[pick(rng)];
        used[cell_index(obj.pos, out.width)] = false;
        used[cell] = true;
        obj.pos = {static_cast<int>(cell % static_cast<std::size_t>(out.width)),
                   static_cast<int>(cell / static_cast<std::size_t>(out.width))};
    }
    return out;
}

std::size_t state_id(const SarState &s, const EnvConfig &config) {
    const std::size_t flags = (s.fire_here ? 4u : 0u) | (s.obstacle_here ? 2u : 0u) | (s.victim_here ? 1u : 0u);
    return cell_index(s.pos, config.width) * 8 + flags;
}

std::size_t state_id(const DstState &s, const EnvConfig &config) { return cell_index(s.pos, config.width); }

std::size_t state_id(const RgState &s, const EnvConfig &config) {
    const std::size_t flags = (s.gold_here ? 4u : 0u) | (s.gem_here ? 2u : 0u) | (s.enemy_here ? 1u : 0u);
    return cell_index(s.pos, config.width) * 8 + flags;
}

// ---------------------------------------------------------------- GridWorld

GridWorld::GridWorld(EnvConfig config) : config_(std::move(config)) { validate(config_); }

std::mt19937_64 GridWorld::make_episode_rng(std::uint64_t episode_seed) const {
    std::seed_seq seq{static_cast<std::uint32_t>(config_.seed), static_cast<std::uint32_t>(config_.seed >> 32),
                      static_cast<std::uint32_t>(episode_seed), static_cast<std::uint32_t>(episode_seed >> 32)};
    return std::mt19937_64(seq);
}

GridPosition GridWorld::random_free_cell(std::mt19937_64 &rng) const {
    const auto used = occupancy(config_);
    std::vector<std::size_t> free_cells;
    for (std::size_t c = 0; c < used.size(); ++c)
        if (!used[c]) free_cells.push_back(c);
    if (free_cells.empty()) throw config_error("no free start cell");
    std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
    const std::size_t cell = free_cells[pick(rng)];
    return {static_cast<int>(cell % static_cast<std::size_t>(config_.width)),
            static_cast<int>(cell / static_cast<std::size_t>(config_.width))};
}

GridPosition GridWorld::target_of(GridPosition from, std::size_t action) const {
    switch (static_cast<Move>(action)) {
    case Move::east: return {from.x + 1, from.y};
    case Move::west: return {from.x - 1, from.y};
    case Move::north: return {from.x, from.y - 1};
    case Move::south: return {from.x, from.y + 1};
    }
    throw contract_error("action outside the move set");
}

bool GridWorld::in_bounds(GridPosition p) const {
    return p.x >= 0 && p.x < config_.width && p.y >= 0 && p.y < config_.height;
}

const PlacedObject *GridWorld::object_at(GridPosition p, ObjectKind kind) const {
    for (const auto &o : config_.objects)
        if (o.kind == kind && o.pos == p) return &o;
    return nullptr;
}

void GridWorld::begin_step(std::size_t action) {
    require(!done_, "step called on a finished episode");
    require(action < move_count, "action outside the move set");
    ++steps_;
}

// ---------------------------------------------------------------- SAR

SarEnv::SarEnv(EnvConfig config) : GridWorld(std::move(config)) {
    require(config_.kind == EnvKind::sar, "SarEnv needs a sar layout");
    for (std::size_t i = 0; i < config_.objects.size(); ++i)
        if (config_.objects[i].kind == ObjectKind::victim) victim_objects_.push_back(i);
}

std::size_t SarEnv::num_states() const { return static_cast<std::size_t>(config_.width * config_.height) * 8; }

SarState SarEnv::state() const {
    SarState s{pos_};
    s.fire_here = object_at(pos_, ObjectKind::fire) != nullptr;
    s.obstacle_here = object_at(pos_, ObjectKind::obstacle) != nullptr;
    for (std::size_t i = 0; i < victim_objects_.size(); ++i)
        if (config_.objects[victim_objects_[i]].pos == pos_ && status_[i] != VictimStatus::dead) s.victim_here = true;
    return s;
}

std::size_t SarEnv::reset(std::uint64_t episode_seed) {
    auto rng = make_episode_rng(episode_seed);
    pos_ = random_free_cell(rng);
    steps_ = 0;
    status_.assign(victim_objects_.size(), VictimStatus::alive);
    death_times_.assign(victim_objects_.size(), 0);
    if (config_.victim_death_range) {
        std::uniform_int_distribution<int> xi(config_.victim_death_range->first, config_.victim_death_range->second);
        for (auto &t : death_times_) t = xi(rng);
    }
    done_ = victim_objects_.empty();
    return current_state_id();
}

StepOutcome SarEnv::step(std::size_t action) {
    begin_step(action);
    const GridPosition target = target_of(pos_, action);
    if (in_bounds(target) && object_at(target, ObjectKind::obstacle) == nullptr) pos_ = target;

    RewardVector reward{0.0, -1.0};
    if (object_at(pos_, ObjectKind::fire) != nullptr) reward[0] = -5.0;

    bool unresolved = false;
    for (std::size_t i = 0; i < victim_objects_.size(); ++i) {
        if (status_[i] != VictimStatus::alive) continue;
        const bool expired = config_.victim_death_range && steps_ >= death_times_[i];
        if (config_.objects[victim_objects_[i]].pos == pos_ &&
            (!config_.victim_death_range || steps_ <= death_times_[i]))
            status_[i] = VictimStatus::rescued;
        else if (expired)
            status_[i] = VictimStatus::dead;
        else
            unresolved = true;
    }
    done_ = !unresolved || steps_ >= config_.step_cap;
    const bool truncated = done_ && unresolved;
    return {current_state_id(), std::move(reward), done_, truncated};
}

// ---------------------------------------------------------------- DST

DstEnv::DstEnv(EnvConfig config) : GridWorld(std::move(config)) {
    require(config_.kind == EnvKind::dst, "DstEnv needs a dst layout");
}

std::size_t DstEnv::num_states() const { return static_cast<std::size_t>(config_.width * config_.height); }

std::size_t DstEnv::reset(std::uint64_t episode_seed) {
    auto rng = make_episode_rng(episode_seed);
    pos_ = random_free_cell(rng);
    steps_ = 0;
    done_ = false;
    return current_state_id();
}

StepOutcome DstEnv::step(std::size_t action) {
    begin_step(action);
    const GridPosition target = target_of(pos_, action);
    if (in_bounds(target)) pos_ = target;

    RewardVector reward{-1.0, 0.0};
    const bool found = [&] {
        if (const auto *t = object_at(pos_, ObjectKind::treasure)) {
            reward[1] = t->value;
            return true;
        }
        return false;
    }();
    done_ = found || steps_ >= config_.step_cap;
    const bool truncated = done_ && !found;
    return {current_state_id(), std::move(reward), done_, truncated};
}

// ---------------------------------------------------------------- RG

RgEnv::RgEnv(EnvConfig config) : GridWorld(std::move(config)) {
    require(config_.kind == EnvKind::rg, "RgEnv needs an rg layout");
}

std::size_t RgEnv::num_states() const { return static_cast<std::size_t>(config_.width * config_.height) * 8; }

bool RgEnv::resource_available(ObjectKind kind) const {
    if (object_at(pos_, kind) == nullptr) return false;
    return kind == ObjectKind::gold ? !gold_taken_ : !gem_taken_;
}

RgState RgEnv::state() const {
    RgState s{pos_};
    s.gold_here = resource_available(ObjectKind::gold);
    s.gem_here = resource_available(ObjectKind::gem);
    s.enemy_here = object_at(pos_, ObjectKind::enemy) != nullptr;
    return s;
}

std::size_t RgEnv::reset(std::uint64_t episode_seed) {
    rng_ = make_episode_rng(episode_seed);
    pos_ = *config_.home;
    steps_ = 0;
    carried_gold_ = carried_gem_ = false;
    gold_taken_ = gem_taken_ = false;
    done_ = false;
    return current_state_id();
}

StepOutcome RgEnv::step(std::size_t action) {
    begin_step(action);
    const GridPosition from = pos_;
    const GridPosition target = target_of(pos_, action);
    if (in_bounds(target)) pos_ = target;

    RewardVector reward{0.0, 0.0};
    if (pos_ != from && object_at(pos_, ObjectKind::enemy) != nullptr) {
        ++enemy_entries_;
        std::bernoulli_distribution attack(config_.attack_probability);
        if (attack(rng_)) {
            ++attacks_;
            reward[1] = -1.0;
            carried_gold_ = carried_gem_ = false;
            pos_ = *config_.home;
            done_ = true;
            return {current_state_id(), std::move(reward), done_};
        }
    }
    if (resource_available(ObjectKind::gold)) {
        gold_taken_ = carried_gold_ = true;
        reward[0] += 1.0;
    }
    if (resource_available(ObjectKind::gem)) {
        gem_taken_ = carried_gem_ = true;
        reward[0] += 1.0;
    }
    const bool returned = pos_ == *config_.home && from != pos_;
    done_ = returned || steps_ >= config_.step_cap;
    const bool truncated = done_ && !returned;
    return {current_state_id(), std::move(reward), done_, truncated};
}

std::unique_ptr<GridWorld> make_environment(const EnvConfig &config) {
    switch (config.kind) {
    case EnvKind::sar: return std::make_unique<SarEnv>(config);
    case EnvKind::dst: return std::make_unique<DstEnv>(config);
    case EnvKind::rg: return std::make_unique<RgEnv>(config);
    }
    throw config_error("unknown environment kind");
}

// ---------------------------------------------------------------- TableMomdp

TableMomdp::TableMomdp(std::vector<std::vector<Edge>> edges, std::vector<bool> terminal,
                       std::vector<std::size_t> start_states, int step_cap)
    : edges_(std::move(edges)), terminal_(std::move(terminal)), start_states_(std::move(start_states)),
      step_cap_(step_cap) {
    require(!edges_.empty() && !edges_.front().empty(), "table MOMDP needs states and actions");
    require(terminal_.size() == edges_.size(), "terminal flags must cover every state");
    require(!start_states_.empty(), "table MOMDP needs a start state");
    for (const auto &row : edges_) {
        require(row.size() == edges_.front().size(), "every state needs the same action count");
        for (const auto &e : row) require(e.next < edges_.size(), "transition target out of range");
    }
    for (auto s : start_states_) require(s < edges_.size() && !terminal_[s], "start state must be non-terminal");
}

std::size_t TableMomdp::reset(std::uint64_t episode_seed) {
    std::mt19937_64 rng(episode_seed);
    std::uniform_int_distribution<std::size_t> pick(0, start_states_.size() - 1);
    state_ = start_states_[pick(rng)];
    steps_ = 0;
    done_ = false;
    return state_;
}

StepOutcome TableMomdp::step(std::size_t action) {
    require(!done_, "step called on a finished episode");
    require(action < num_actions(), "action out of range");
    ++steps_;
    const Edge &e = edges_[state_][action];
    state_ = e.next;
    done_ = terminal_[state_] || steps_ >= step_cap_;
    const bool truncated = done_ && !terminal_[state_];
    return {state_, e.reward, done_, truncated};
}

} // namespace morl
