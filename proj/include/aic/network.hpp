#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace aic {

using Count = std::int64_t;

/// Ordered set of species identifiers. Indices are stable once assigned.
class SpeciesTable {
  public:
    SpeciesTable() = default;
    explicit SpeciesTable(std::vector<std::string> names) {
        for (auto& n : names)
            add(std::move(n));
    }

    static bool valid_identifier(std::string_view name) {
        if (name.empty())
            return false;
        auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
        if (!alpha(name.front()))
            return false;
        return std::all_of(name.begin() + 1, name.end(),
                           [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
    }

    std::size_t add(std::string name) {
        if (!valid_identifier(name))
            throw std::invalid_argument("invalid species identifier '" + name + "'");
        if (index_of(name))
            throw std::invalid_argument("duplicate species '" + name + "'");
        names_.push_back(std::move(name));
        return names_.size() - 1;
    }

    std::optional<std::size_t> index_of(std::string_view name) const {
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - names_.begin());
    }

    const std::string& operator[](std::size_t i) const { return names_.at(i); }
    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    bool operator==(const SpeciesTable&) const = default;

  private:
    std::vector<std::string> names_;
};

struct MassAction {
    double rate = 0.0;
    bool operator==(const MassAction&) const = default;
};

/// Production repressed by `input`: alpha * K^n / (K^n + x_input^n).
struct RepressingHill {
    double alpha = 0.0;
    double K = 1.0;
    int n = 1;
    std::size_t input = 0;
    bool operator==(const RepressingHill&) const = default;
};

using PropensityKind = std::variant<MassAction, RepressingHill>;

struct Reaction {
    std::vector<std::size_t> reactants; // sorted multiset
    std::vector<std::size_t> products;  // sorted multiset
    PropensityKind kind;
    std::string label;

    bool operator==(const Reaction&) const = default;

    std::size_t order() const noexcept { return reactants.size(); }
    bool is_hill() const noexcept { return std::holds_alternative<RepressingHill>(kind); }
    bool is_homodimer() const noexcept {
        return reactants.size() == 2 && reactants[0] == reactants[1];
    }
};

struct State {
    std::vector<Count> counts;

    State() = default;
    explicit State(std::vector<Count> c) : counts(std::move(c)) {
        if (std::any_of(counts.begin(), counts.end(), [](Count v) { return v < 0; }))
            throw std::invalid_argument("state has a negative copy number");
    }
    static State zeros(std::size_t d) { return State(std::vector<Count>(d, 0)); }

    std::size_t size() const noexcept { return counts.size(); }
    Count operator[](std::size_t i) const { return counts[i]; }
    bool operator==(const State&) const = default;
};

namespace detail {

inline double hill_value(const RepressingHill& h, double x) {
    const double kn = std::pow(h.K, h.n);
    return h.alpha * kn / (kn + std::pow(x, h.n));
}

} // namespace detail

/// The open- or closed-loop network (X, propensities, stoichiometries).
class ReactionNetwork {
  public:
    ReactionNetwork(SpeciesTable species, std::vector<Reaction> reactions, std::size_t actuated,
                    std::size_t regulated)
        : species_(std::move(species)), reactions_(std::move(reactions)), actuated_(actuated),
          regulated_(regulated) {
        validate();
    }

    const SpeciesTable& species() const noexcept { return species_; }
    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
    const Reaction& reaction(std::size_t k) const { return reactions_.at(k); }
    std::size_t num_species() const noexcept { return species_.size(); }
    std::size_t num_reactions() const noexcept { return reactions_.size(); }
    std::size_t actuated() const noexcept { return actuated_; }
    std::size_t regulated() const noexcept { return regulated_; }

    /// Stoichiometric vector: products minus reactants.
    std::vector<int> stoichiometry(std::size_t k) const {
        std::vector<int> zeta(num_species(), 0);
        const auto& r = reaction(k);
        for (auto i : r.products)
            ++zeta[i];
        for (auto i : r.reactants)
            --zeta[i];
        return zeta;
    }

    std::optional<std::size_t> find_reaction(std::string_view label) const {
        for (std::size_t k = 0; k < reactions_.size(); ++k)
            if (reactions_[k].label == label)
                return k;
        return std::nullopt;
    }

    /// Copy with the rate constant (or Hill alpha) of reaction `k` replaced.
    ReactionNetwork with_rate(std::size_t k, double rate) const {
        auto copy = *this;
        auto& kind = copy.reactions_.at(k).kind;
        if (auto* ma = std::get_if<MassAction>(&kind))
            ma->rate = rate;
        else
            std::get<RepressingHill>(kind).alpha = rate;
        copy.validate();
        return copy;
    }

    ReactionNetwork with_reaction(std::size_t k, Reaction r) const {
        auto copy = *this;
        copy.reactions_.at(k) = std::move(r);
        copy.validate();
        return copy;
    }

    bool operator==(const ReactionNetwork&) const = default;

  private:
    void validate() {
        const auto d = species_.size();
        if (reactions_.empty())
            throw std::invalid_argument("network has no reactions");
        if (actuated_ >= d || regulated_ >= d)
            throw std::invalid_argument("actuated/regulated species index out of range");
        for (auto& r : reactions_) {
            std::sort(r.reactants.begin(), r.reactants.end());
            std::sort(r.products.begin(), r.products.end());
            auto bad = [d](std::size_t i) { return i >= d; };
            if (std::any_of(r.reactants.begin(), r.reactants.end(), bad) ||
                std::any_of(r.products.begin(), r.products.end(), bad))
                throw std::invalid_argument("reaction references an unknown species");
            if (r.reactants.size() > 2)
                throw std::invalid_argument("mass-action kinetics supports at most two reactants");
            if (const auto* ma = std::get_if<MassAction>(&r.kind)) {
                if (!(ma->rate >= 0.0) || !std::isfinite(ma->rate))
                    throw std::invalid_argument("rate constant must be finite and nonnegative");
            } else {
                const auto& h = std::get<RepressingHill>(r.kind);
                if (!r.reactants.empty())
                    throw std::invalid_argument("Hill kinetics is only allowed on pure production");
                if (!(h.alpha >= 0.0) || !(h.K > 0.0) || h.n < 1 || h.input >= d)
                    throw std::invalid_argument("invalid Hill parameters");
            }
        }
    }

    SpeciesTable species_;
    std::vector<Reaction> reactions_;
    std::size_t actuated_;
    std::size_t regulated_;
};

/// Propensity of reaction `r` at integer counts `x`. Zero whenever firing would
/// make a count negative.
inline double propensity(const Reaction& r, std::span<const Count> x) {
    if (const auto* h = std::get_if<RepressingHill>(&r.kind))
        return detail::hill_value(*h, static_cast<double>(x[h->input]));
    const double c = std::get<MassAction>(r.kind).rate;
    switch (r.reactants.size()) {
    case 0:
        return c;
    case 1:
        return c * static_cast<double>(x[r.reactants[0]]);
    default: {
        const auto i = r.reactants[0], j = r.reactants[1];
        if (i == j) {
            const Count xi = x[i];
            return xi < 2 ? 0.0 : c * static_cast<double>(xi) * static_cast<double>(xi - 1);
        }
        return c * static_cast<double>(x[i]) * static_cast<double>(x[j]);
    }
    }
}

inline std::vector<double> propensity(const ReactionNetwork& net, const State& x) {
    if (x.size() != net.num_species())
        throw std::invalid_argument("state dimension does not match network");
    std::vector<double> a(net.num_reactions());
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = propensity(net.reaction(k), x.counts);
    return a;
}

/// x + zeta_k. Calling this for a reaction with zero propensity is a logic error.
inline State apply_reaction(const State& x, const ReactionNetwork& net, std::size_t k) {
    if (k >= net.num_reactions())
        throw std::out_of_range("reaction index out of range");
    if (!(propensity(net.reaction(k), x.counts) > 0.0))
        throw std::logic_error("apply_reaction called on a reaction with zero propensity");
    auto counts = x.counts;
    const auto zeta = net.stoichiometry(k);
    for (std::size_t i = 0; i < counts.size(); ++i)
        counts[i] += zeta[i];
    return State(std::move(counts));
}

} // namespace aic
