#pragma once

#include <cstddef>
#include <cstdint>

#include "bmdp/model.hpp"

namespace bmdp {

struct GenParams {
    std::size_t n_types = 5;
    std::size_t max_actions = 3;
    std::size_t max_outcomes = 3;
    std::size_t max_offspring_len = 3;
    double cost_low = 1.0;
    double cost_high = 10.0;
    /// Caps every action's expected offspring count at 0.9, which bounds the
    /// spectral radius of every strategy's offspring matrix by 0.9.
    bool subcritical = true;
    /// Offspring of type i only use types with a larger index (acyclic).
    bool hierarchical = false;
    std::uint64_t seed = 0;

    void check() const;
};

inline constexpr double kSubcriticalRowSum = 0.9;

/// Random model, a pure function of the parameters. Types are named t0, t1,
/// ..., actions a1, a2, ...; the initial configuration is [t0].
[[nodiscard]] Bmdp gen_random_bmdp(const GenParams& params);

}  // namespace bmdp
