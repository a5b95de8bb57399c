#pragma once

#include "bnb/action.hpp"
#include "bnb/env.hpp"
#include "bnb/replay.hpp"
#include "bnb/search.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace bnb::testing {

std::filesystem::path fixture(const std::string& relative);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
    std::size_t between(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
    }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
    bool chance(double p) { return unit() < p; }
    template <typename T>
    const T& pick(const std::vector<T>& items) { return items[below(items.size())]; }

    std::string word();
    std::string text();  // may contain the signature delimiter, digits, spaces

private:
    std::mt19937_64 gen_;
};

Action random_action(Rng& rng);

// Random site: pages p0..pn-1 with links, wildcard fields, selects and
// effect buttons. Every world variable has a single possible value.
Json random_site_doc(Rng& rng, std::size_t index);

struct Walk {
    Trajectory tau;
    std::vector<EnvState> states;  // states[j] is the state at index j
};

// Random action sequence from reset(graph), mixing page actions, direct
// navigation, history moves and tab operations.
Walk random_walk(Rng& rng, const SiteGraph& graph, std::size_t length);

// Oracle: re-executes a_0 .. a_{j-1} from the initial page with `world` as
// the server-side store.
EnvState reexecute(const SiteGraph& graph, const std::vector<Action>& actions, std::size_t j,
                   const std::map<std::string, std::string>& world);

std::vector<Json> read_trace(const std::filesystem::path& file);

// Events of `kind` in trace order.
std::vector<Json> events(const std::vector<Json>& trace, const std::string& kind);

} // namespace bnb::testing
