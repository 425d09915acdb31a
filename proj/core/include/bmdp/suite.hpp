#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bmdp/generator.hpp"
#include "bmdp/model.hpp"

namespace bmdp {

/// Source text of the bundled model files.
[[nodiscard]] std::string_view cloud1_source() noexcept;
[[nodiscard]] std::string_view cloud2_source() noexcept;
[[nodiscard]] std::string_view cloud2_p50_source() noexcept;

/// Parses text that is known to be valid; throws std::runtime_error otherwise.
[[nodiscard]] Bmdp parse_or_throw(std::string_view text);

[[nodiscard]] Bmdp cloud1();
[[nodiscard]] Bmdp cloud2();
/// cloud2 with H interrupted with probability 0.5; H has infinite value.
[[nodiscard]] Bmdp cloud2_p50();

struct NamedModel {
    std::string name;
    Bmdp model;
};

inline constexpr std::array<std::uint64_t, 5> kSuiteSeeds{7, 19, 42, 68, 283};

/// Generator settings used for the random members of the embedded suite.
[[nodiscard]] GenParams suite_gen_params(std::uint64_t seed);

/// cloud1, cloud2, cloud2_p50 and one random model per kSuiteSeeds entry.
[[nodiscard]] std::vector<NamedModel> embedded_suite();

}  // namespace bmdp
