#pragma once

#include <stdexcept>
#include <string>

namespace morl {

// Precondition or argument-shape violation by the caller.
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Too few samples to evaluate a statistic.
struct insufficient_samples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration (layouts, experiment configs).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Retrieval from an empty steppingstone store.
struct no_steppingstone : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Statistical test cannot be evaluated on the given samples.
struct undefined_test : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Offline training ran out of budget before the edge preferences were covered.
struct partial_set_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string &what) {
    if (!cond) throw contract_error(what);
}

} // namespace morl
