#pragma once

// Benchmark multi-objective grid worlds: search and rescue (SAR),
// deep sea treasure (DST) and resource gathering (RG), plus a small
// table-driven MOMDP used by tests and oracles.

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morl/core.hpp"

namespace morl {

enum class EnvKind { sar, dst, rg };
enum class ObjectKind { fire, obstacle, victim, treasure, gold, gem, enemy };

std::string_view to_string(EnvKind k);
std::string_view to_string(ObjectKind k);
EnvKind parse_env_kind(std::string_view s);
ObjectKind parse_object_kind(std::string_view s);

// Moves: east (+x), west (-x), north (-y), south (+y).
enum class Move : std::size_t { east = 0, west = 1, north = 2, south = 3 };
inline constexpr std::size_t move_count = 4;

struct GridPosition {
    int x = 0;
    int y = 0;
    friend bool operator==(const GridPosition &, const GridPosition &) = default;
};

struct PlacedObject {
    ObjectKind kind;
    GridPosition pos;
    double value = 0.0; // treasure value (DST only)
    friend bool operator==(const PlacedObject &, const PlacedObject &) = default;
};

struct EnvConfig {
    EnvKind kind = EnvKind::dst;
    int width = 0;
    int height = 0;
    std::vector<PlacedObject> objects;
    std::optional<GridPosition> home;                    // RG only
    std::optional<std::pair<int, int>> victim_death_range; // SAR only; absent = victims never die
    double attack_probability = 0.10;                    // RG only
    int step_cap = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const EnvConfig &, const EnvConfig &) = default;
};

std::pair<int, int> grid_dims(EnvKind kind);
int default_step_cap(EnvKind kind);

/// Throws config_error when the layout breaks an invariant.
void validate(const EnvConfig &config);

/// Stable 64-bit fingerprint of the object layout.
std::uint64_t layout_hash(const EnvConfig &config);

/// Relocates floor(fraction * object_count) objects, chosen uniformly
/// without replacement, to uniformly chosen free cells.
EnvConfig perturb(const EnvConfig &config, double fraction, std::uint64_t perturb_seed);

EnvConfig load_layout(const std::filesystem::path &path);
EnvConfig layout_from_json_text(std::string_view text);
std::string layout_to_json_text(const EnvConfig &config);
std::filesystem::path layout_dir();
std::filesystem::path default_layout_path(EnvKind kind);
EnvConfig default_layout(EnvKind kind);

struct StepOutcome {
    std::size_t next_state; // state id of the post-step observation
    RewardVector reward;
    bool done;
    bool truncated = false; // done only because the step cap was reached
};

/// Episodic environment with dense state ids, as seen by tabular learners.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::size_t num_states() const = 0;
    virtual std::size_t num_actions() const { return move_count; }
    virtual std::size_t num_objectives() const { return 2; }

    virtual std::size_t reset(std::uint64_t episode_seed) = 0;
    virtual StepOutcome step(std::size_t action) = 0;
    virtual std::size_t current_state_id() const = 0;
    virtual bool done() const = 0;
};

struct SarState {
    GridPosition pos;
    bool fire_here = false;
    bool obstacle_here = false;
    bool victim_here = false;
    friend bool operator==(const SarState &, const SarState &) = default;
};

struct DstState {
    GridPosition pos;
    friend bool operator==(const DstState &, const DstState &) = default;
};

struct RgState {
    GridPosition pos;
    bool gold_here = false;
    bool gem_here = false;
    bool enemy_here = false;
    friend bool operator==(const RgState &, const RgState &) = default;
};

std::size_t state_id(const SarState &s, const EnvConfig &config);
std::size_t state_id(const DstState &s, const EnvConfig &config);
std::size_t state_id(const RgState &s, const EnvConfig &config);

// Shared grid mechanics: bounds, step counting, episode RNG.
class GridWorld : public Environment {
public:
    explicit GridWorld(EnvConfig config);

    const EnvConfig &config() const { return config_; }
    bool done() const override { return done_; }
    int steps() const { return steps_; }
    GridPosition position() const { return pos_; }

protected:
    std::mt19937_64 make_episode_rng(std::uint64_t episode_seed) const;
    GridPosition random_free_cell(std::mt19937_64 &rng) const;
    GridPosition target_of(GridPosition from, std::size_t action) const;
    bool in_bounds(GridPosition p) const;
    const PlacedObject *object_at(GridPosition p, ObjectKind kind) const;
    void begin_step(std::size_t action);

    EnvConfig config_;
    GridPosition pos_;
    int steps_ = 0;
    bool done_ = true;
};

class SarEnv final : public GridWorld {
public:
    enum class VictimStatus { alive, rescued, dead };

    explicit SarEnv(EnvConfig config);

    std::size_t num_states() const override;
    std::size_t reset(std::uint64_t episode_seed) override;
    StepOutcome step(std::size_t action) override;
    std::size_t current_state_id() const override { return state_id(state(), config_); }

    SarState state() const;
    const std::vector<int> &death_times() const { return death_times_; }
    const std::vector<VictimStatus> &victims() const { return status_; }

private:
    std::vector<std::size_t> victim_objects_;
    std::vector<int> death_times_;
    std::vector<VictimStatus> status_;
};

class DstEnv final : public GridWorld {
public:
    explicit DstEnv(EnvConfig config);

    std::size_t num_states() const override;
    std::size_t reset(std::uint64_t episode_seed) override;
    StepOutcome step(std::size_t action) override;
    std::size_t current_state_id() const override { return state_id(state(), config_); }

    DstState state() const { return {pos_}; }
};

class RgEnv final : public GridWorld {
public:
    explicit RgEnv(EnvConfig config);

    std::size_t num_states() const override;
    std::size_t reset(std::uint64_t episode_seed) override;
    StepOutcome step(std::size_t action) override;
    std::size_t current_state_id() const override { return state_id(state(), config_); }

    RgState state() const;
    bool carrying_gold() const { return carried_gold_; }
    bool carrying_gem() const { return carried_gem_; }
    // Number of enemy-cell entries and attacks since construction.
    std::size_t enemy_entries() const { return enemy_entries_; }
    std::size_t attacks() const { return attacks_; }

    // Test hook: place the agent mid-episode.
    void teleport(GridPosition p) { pos_ = p; }

private:
    bool resource_available(ObjectKind kind) const;

    std::mt19937_64 rng_;
    bool carried_gold_ = false;
    bool carried_gem_ = false;
    bool gold_taken_ = false;
    bool gem_taken_ = false;
    std::size_t enemy_entries_ = 0;
    std::size_t attacks_ = 0;
};

std::unique_ptr<GridWorld> make_environment(const EnvConfig &config);

/// Deterministic finite MOMDP given by explicit tables. Episodes start in a
/// uniformly drawn state from `start_states` and end on entering a terminal
/// state or at `step_cap`.
class TableMomdp final : public Environment {
public:
    struct Edge {
        std::size_t next;
        RewardVector reward;
    };

    TableMomdp(std::vector<std::vector<Edge>> edges, std::vector<bool> terminal,
               std::vector<std::size_t> start_states, int step_cap = 100);

    std::size_t num_states() const override { return edges_.size(); }
    std::size_t num_actions() const override { return edges_.front().size(); }
    std::size_t num_objectives() const override { return edges_.front().front().reward.size(); }
    std::size_t reset(std::uint64_t episode_seed) override;
    StepOutcome step(std::size_t action) override;
    std::size_t current_state_id() const override { return state_; }
    bool done() const override { return done_; }

    const Edge &edge(std::size_t s, std::size_t a) const { return edges_[s][a]; }
    bool terminal(std::size_t s) const { return terminal_[s]; }
    const std::vector<std::size_t> &start_states() const { return start_states_; }

private:
    std::vector<std::vector<Edge>> edges_;
    std::vector<bool> terminal_;
    std::vector<std::size_t> start_states_;
    int step_cap_;
    std::size_t state_ = 0;
    int steps_ = 0;
    bool done_ = true;
};

} // namespace morl
