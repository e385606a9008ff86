#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aic/ensemble.hpp"
#include "aic/network.hpp"

namespace aic {

/// Antithetic integral controller:
///   reference    0       -> Z1        @ mu
///   measurement  X_l     -> X_l + Z2  @ theta
///   comparison   Z1 + Z2 -> 0         @ eta
///   actuation    Z1      -> Z1 + X_1  @ k
struct AntitheticSpec {
    double mu = 1.0;
    double theta = 1.0;
    double eta = 1.0;
    double k = 1.0;

    void validate() const {
        for (double v : {mu, theta, eta, k})
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("antithetic controller parameters must be finite and positive");
    }
    double set_point() const { return mu / theta; }
    bool operator==(const AntitheticSpec&) const = default;
};

/// Static controller 0 -> X_1 at rate alpha K^n / (K^n + X_l^n).
struct HillSpec {
    double alpha = 1.0;
    double K = 1.0;
    int n = 1;

    void validate() const {
        if (!(alpha > 0.0) || !(K > 0.0) || n < 1)
            throw std::invalid_argument("Hill controller parameters must be positive");
    }
    bool operator==(const HillSpec&) const = default;
};

using ControllerKind = std::variant<std::monostate, AntitheticSpec, HillSpec>;

inline constexpr const char* kReferenceLabel = "reference";
inline constexpr const char* kMeasurementLabel = "measurement";
inline constexpr const char* kComparisonLabel = "comparison";
inline constexpr const char* kActuationLabel = "actuation";
inline constexpr const char* kHillLabel = "hill_control";

struct ClosedLoopNetwork {
    ReactionNetwork net;
    ControllerKind controller;
    std::size_t open_reactions = 0;
    std::size_t open_species = 0;
    std::vector<std::string> warnings;

    bool is_antithetic() const { return std::holds_alternative<AntitheticSpec>(controller); }
    bool is_hill() const { return std::holds_alternative<HillSpec>(controller); }
    /// Z1 and Z2 are the two species appended after the open-loop species.
    std::size_t z1() const {
        require_antithetic();
        return open_species;
    }
    std::size_t z2() const {
        require_antithetic();
        return open_species + 1;
    }

  private:
    void require_antithetic() const {
        if (!is_antithetic())
            throw std::logic_error("network has no antithetic controller");
    }
};

inline ClosedLoopNetwork open_loop(const ReactionNetwork& open) {
    return ClosedLoopNetwork{open, std::monostate{}, open.num_reactions(), open.num_species(), {}};
}

namespace detail {

inline std::string fresh_name(const SpeciesTable& t, const std::string& base, std::vector<std::string>& warnings) {
    if (!t.index_of(base))
        return base;
    for (int suffix = 1;; ++suffix) {
        auto candidate = base + "_" + std::to_string(suffix);
        if (!t.index_of(candidate)) {
            warnings.push_back("species '" + base + "' already exists; controller species renamed to '" +
                               candidate + "'");
            return candidate;
        }
    }
}

} // namespace detail

inline ClosedLoopNetwork augment_antithetic(const ReactionNetwork& open, const AntitheticSpec& spec) {
    spec.validate();
    std::vector<std::string> warnings;
    SpeciesTable species = open.species();
    const auto z1 = species.add(detail::fresh_name(species, "Z1", warnings));
    const auto z2 = species.add(detail::fresh_name(species, "Z2", warnings));
    const auto xl = open.regulated();
    const auto x1 = open.actuated();

    auto reactions = open.reactions();
    reactions.push_back(Reaction{{}, {z1}, MassAction{spec.mu}, kReferenceLabel});
    reactions.push_back(Reaction{{xl}, {xl, z2}, MassAction{spec.theta}, kMeasurementLabel});
    reactions.push_back(Reaction{{z1, z2}, {}, MassAction{spec.eta}, kComparisonLabel});
    reactions.push_back(Reaction{{z1}, {z1, x1}, MassAction{spec.k}, kActuationLabel});

    return ClosedLoopNetwork{ReactionNetwork(std::move(species), std::move(reactions), x1, xl), spec,
                             open.num_reactions(), open.num_species(), std::move(warnings)};
}

inline ClosedLoopNetwork augment_hill(const ReactionNetwork& open, const HillSpec& spec) {
    spec.validate();
    auto reactions = open.reactions();
    reactions.push_back(
        Reaction{{}, {open.actuated()}, RepressingHill{spec.alpha, spec.K, spec.n, open.regulated()}, kHillLabel});
    return ClosedLoopNetwork{ReactionNetwork(open.species(), std::move(reactions), open.actuated(), open.regulated()),
                             spec, open.num_reactions(), open.num_species(), {}};
}

/// Recovers the open-loop network by dropping controller species and reactions.
inline ReactionNetwork strip_controller(const ClosedLoopNetwork& closed) {
    const auto& names = closed.net.species().names();
    SpeciesTable species(std::vector<std::string>(names.begin(),
                                                  names.begin() + static_cast<std::ptrdiff_t>(closed.open_species)));
    std::vector<Reaction> reactions(closed.net.reactions().begin(),
                                    closed.net.reactions().begin() + static_cast<std::ptrdiff_t>(closed.open_reactions));
    return ReactionNetwork(std::move(species), std::move(reactions), closed.net.actuated(), closed.net.regulated());
}

/// Closed loop with one named parameter changed. Controller parameters are
/// mu, theta, eta, k (antithetic) or alpha, K, n (Hill); any other name is
/// looked up as a reaction label and sets that reaction's rate constant.
inline ClosedLoopNetwork with_parameter(const ClosedLoopNetwork& closed, const std::string& name, double value) {
    auto out = closed;
    if (auto* a = std::get_if<AntitheticSpec>(&out.controller)) {
        const std::size_t base = closed.open_reactions;
        if (name == "mu" || name == "theta" || name == "eta" || name == "k") {
            std::size_t offset = name == "mu" ? 0 : name == "theta" ? 1 : name == "eta" ? 2 : 3;
            (name == "mu" ? a->mu : name == "theta" ? a->theta : name == "eta" ? a->eta : a->k) = value;
            a->validate();
            out.net = closed.net.with_rate(base + offset, value);
            return out;
        }
    }
    if (auto* h = std::get_if<HillSpec>(&out.controller)) {
        if (name == "alpha" || name == "K" || name == "n") {
            if (name == "alpha")
                h->alpha = value;
            else if (name == "K")
                h->K = value;
            else {
                if (value != std::floor(value))
                    throw std::invalid_argument("Hill exponent must be an integer");
                h->n = static_cast<int>(value);
            }
            h->validate();
            auto r = closed.net.reaction(closed.open_reactions);
            r.kind = RepressingHill{h->alpha, h->K, h->n, closed.net.regulated()};
            out.net = closed.net.with_reaction(closed.open_reactions, std::move(r));
            return out;
        }
    }
    auto k = closed.net.find_reaction(name);
    if (!k || *k >= closed.open_reactions)
        throw std::invalid_argument("unknown parameter '" + name + "'");
    out.net = closed.net.with_rate(*k, value);
    return out;
}

/// A time series with a standard error per grid point.
struct Series {
    std::vector<double> grid;
    std::vector<double> value;
    std::vector<double> sem;
};

/// mean(Z1) - mean(Z2) with sem sqrt((var Z1 + var Z2 - 2 cov) / n).
inline Series delta_z(const EnsembleStats& stats, std::size_t z1, std::size_t z2) {
    const auto* pair = stats.pair(z1, z2);
    if (z1 >= stats.species.size() || z2 >= stats.species.size() || pair == nullptr)
        throw std::invalid_argument("ensemble statistics lack Z1/Z2 columns or their covariance");
    Series s;
    s.grid = stats.grid;
    const auto n = static_cast<double>(stats.n_paths);
    for (std::size_t g = 0; g < stats.grid.size(); ++g) {
        s.value.push_back(stats.mean[g][z1] - stats.mean[g][z2]);
        const double v = stats.var[g][z1] + stats.var[g][z2] - 2.0 * pair->cov[g];
        s.sem.push_back(std::sqrt(std::max(0.0, v) / n));
    }
    return s;
}

inline Series delta_z(const EnsembleStats& stats) {
    return delta_z(stats, stats.species_index("Z1"), stats.species_index("Z2"));
}

} // namespace aic
