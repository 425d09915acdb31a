#include "bmdp/suite.hpp"

#include <stdexcept>
#include <variant>

#include "bmdp/parser.hpp"

namespace bmdp {

namespace detail {
extern const std::string_view kCloud1Source;
extern const std::string_view kCloud2Source;
extern const std::string_view kCloud2P50Source;
}  // namespace detail

std::string_view cloud1_source() noexcept { return detail::kCloud1Source; }
std::string_view cloud2_source() noexcept { return detail::kCloud2Source; }
std::string_view cloud2_p50_source() noexcept { return detail::kCloud2P50Source; }

Bmdp parse_or_throw(std::string_view text) {
    ParseResult parsed = parse_model(text);
    if (auto* err = std::get_if<ParseError>(&parsed)) throw std::runtime_error(err->to_string());
    return std::get<Bmdp>(std::move(parsed));
}

Bmdp cloud1() { return parse_or_throw(cloud1_source()); }
Bmdp cloud2() { return parse_or_throw(cloud2_source()); }
Bmdp cloud2_p50() { return parse_or_throw(cloud2_p50_source()); }

GenParams suite_gen_params(std::uint64_t seed) {
    GenParams p;
    p.n_types = 6;
    p.max_actions = 3;
    p.max_outcomes = 3;
    p.max_offspring_len = 3;
    p.cost_low = 1.0;
    p.cost_high = 10.0;
    p.subcritical = true;
    p.seed = seed;
    return p;
}

std::vector<NamedModel> embedded_suite() {
    std::vector<NamedModel> suite;
    suite.push_back({"cloud1", cloud1()});
    suite.push_back({"cloud2", cloud2()});
    suite.push_back({"cloud2_p50", cloud2_p50()});
    for (std::uint64_t seed : kSuiteSeeds) {
        Bmdp m = gen_random_bmdp(suite_gen_params(seed));
        std::string name = m.name;
        suite.push_back({std::move(name), std::move(m)});
    }
    return suite;
}

}  // namespace bmdp
