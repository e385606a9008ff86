#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aic/errors.hpp"
#include "aic/network.hpp"
#include "aic/random.hpp"

namespace aic {

/// Default copy-number ceiling; a path that exceeds it fails with DivergenceError.
inline constexpr Count kDefaultCeiling = std::numeric_limits<std::int32_t>::max();

/// A network that is active from `start` until the next phase begins.
struct Phase {
    double start = 0.0;
    ReactionNetwork net;
};

namespace detail {

/// Flattened propensities and sparse stoichiometry for the inner loop.
class Kinetics {
  public:
    explicit Kinetics(const ReactionNetwork& net) : d_(net.num_species()) {
        for (std::size_t k = 0; k < net.num_reactions(); ++k) {
            const auto& r = net.reaction(k);
            Channel c;
            if (const auto* h = std::get_if<RepressingHill>(&r.kind)) {
                c.order = -1;
                c.rate = h->alpha;
                c.Kn = std::pow(h->K, h->n);
                c.n = h->n;
                c.i = h->input;
            } else {
                c.rate = std::get<MassAction>(r.kind).rate;
                c.order = static_cast<int>(r.reactants.size());
                if (c.order >= 1)
                    c.i = r.reactants[0];
                if (c.order == 2)
                    c.j = r.reactants[1];
            }
            const auto zeta = net.stoichiometry(k);
            for (std::size_t s = 0; s < zeta.size(); ++s)
                if (zeta[s] != 0)
                    c.delta.emplace_back(s, zeta[s]);
            channels_.push_back(std::move(c));
        }
    }

    std::size_t num_species() const noexcept { return d_; }
    std::size_t num_reactions() const noexcept { return channels_.size(); }

    double eval(std::size_t k, const Count* x) const {
        const auto& c = channels_[k];
        switch (c.order) {
        case 0:
            return c.rate;
        case 1:
            return c.rate * static_cast<double>(x[c.i]);
        case 2:
            if (c.i == c.j)
                return x[c.i] < 2 ? 0.0 : c.rate * static_cast<double>(x[c.i]) * static_cast<double>(x[c.i] - 1);
            return c.rate * static_cast<double>(x[c.i]) * static_cast<double>(x[c.j]);
        default:
            return c.rate * c.Kn / (c.Kn + std::pow(static_cast<double>(x[c.i]), c.n));
        }
    }

    /// Applies reaction k in place; returns the index of a species above `ceiling`, if any.
    std::optional<std::size_t> apply(std::size_t k, Count* x, Count ceiling) const {
        std::optional<std::size_t> over;
        for (const auto& [s, dz] : channels_[k].delta) {
            x[s] += dz;
            if (x[s] > ceiling)
                over = s;
        }
        return over;
    }

  private:
    struct Channel {
        int order = 0;
        double rate = 0.0;
        double Kn = 1.0;
        int n = 1;
        std::size_t i = 0;
        std::size_t j = 0;
        std::vector<std::pair<std::size_t, int>> delta;
    };

    std::size_t d_;
    std::vector<Channel> channels_;
};

struct NullObserver {
    void hold(double, double, const std::vector<Count>&) {}
    void jump(double, std::size_t, const std::vector<Count>&) {}
};

/// Direct-method path over the given phases up to t_end.
///
/// Observer receives hold(t0, t1, x) for every interval [t0, t1) on which the
/// state is x (including a final interval ending at t_end) and jump(t, k, x)
/// after each firing, with x the post-jump state. A pending firing that would
/// land beyond a phase boundary is discarded and redrawn under the next phase.
template <class Observer>
void run_path(std::span<const Kinetics> phases, std::span<const double> starts, std::vector<Count>& x,
              double t_end, PathRng& rng, Count ceiling, std::size_t path_index, Observer& obs) {
    const std::size_t K_max = [&] {
        std::size_t m = 0;
        for (const auto& p : phases)
            m = std::max(m, p.num_reactions());
        return m;
    }();
    std::vector<double> a(K_max);
    for (std::size_t p = 0; p < phases.size(); ++p) {
        const auto& kin = phases[p];
        double t = starts[p];
        const double t_stop = p + 1 < phases.size() ? starts[p + 1] : t_end;
        const std::size_t K = kin.num_reactions();
        while (true) {
            double a0 = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                a[k] = kin.eval(k, x.data());
                a0 += a[k];
            }
            if (!(a0 > 0.0)) {
                obs.hold(t, t_stop, x);
                break;
            }
            const double tau = rng.exponential(a0);
            if (t + tau >= t_stop) {
                obs.hold(t, t_stop, x);
                break;
            }
            const double target = rng.uniform() * a0;
            std::size_t k = 0;
            double cum = a[0];
            while (cum <= target && k + 1 < K) {
                ++k;
                cum += a[k];
            }
            while (a[k] <= 0.0) // rounding at the top end of the cumulative sum
                --k;
            obs.hold(t, t + tau, x);
            t += tau;
            if (auto over = kin.apply(k, x.data(), ceiling))
                throw DivergenceError(path_index, t, *over);
            obs.jump(t, k, x);
        }
    }
}

inline void check_phases(std::span<const Phase> phases, const State& x0, double t_end) {
    if (phases.empty())
        throw std::invalid_argument("at least one phase is required");
    if (!(t_end > 0.0))
        throw std::invalid_argument("t_end must be positive");
    if (phases.front().start != 0.0)
        throw std::invalid_argument("the first phase must start at t=0");
    for (std::size_t p = 0; p < phases.size(); ++p) {
        if (phases[p].net.num_species() != x0.size())
            throw std::invalid_argument("initial state dimension does not match the network");
        if (phases[p].net.num_species() != phases.front().net.num_species())
            throw std::invalid_argument("all phases must share the species table");
        if (p > 0 && !(phases[p].start > phases[p - 1].start))
            throw std::invalid_argument("phase start times must be strictly increasing");
        if (!(phases[p].start < t_end))
            throw std::invalid_argument("phase starts must lie before t_end");
    }
}

inline std::vector<Kinetics> compile(std::span<const Phase> phases) {
    std::vector<Kinetics> out;
    out.reserve(phases.size());
    for (const auto& p : phases)
        out.emplace_back(p.net);
    return out;
}

inline std::vector<double> phase_starts(std::span<const Phase> phases) {
    std::vector<double> s;
    for (const auto& p : phases)
        s.push_back(p.start);
    return s;
}

} // namespace detail

/// Piecewise-constant sample path.
struct Trajectory {
    std::vector<double> jump_times;
    std::vector<State> states; // initial state, then one per jump
    std::vector<std::size_t> channels; // reaction fired at each jump
    double t_end = 0.0;

    std::size_t num_jumps() const noexcept { return jump_times.size(); }

    /// State held at time t (right-continuous).
    const State& at(double t) const {
        auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
        return states[static_cast<std::size_t>(it - jump_times.begin())];
    }
};

struct SimulationOptions {
    Count ceiling = kDefaultCeiling;
};

inline Trajectory simulate(std::span<const Phase> phases, const State& x0, double t_end, SeedSpec seed,
                           const SimulationOptions& opts = {}) {
    detail::check_phases(phases, x0, t_end);
    const auto kinetics = detail::compile(phases);
    const auto starts = detail::phase_starts(phases);

    struct Recorder {
        Trajectory& traj;
        void hold(double, double, const std::vector<Count>&) {}
        void jump(double t, std::size_t k, const std::vector<Count>& x) {
            traj.jump_times.push_back(t);
            traj.channels.push_back(k);
            traj.states.emplace_back(x);
        }
    };

    Trajectory traj;
    traj.t_end = t_end;
    traj.states.push_back(x0);
    Recorder rec{traj};
    auto x = x0.counts;
    PathRng rng(seed);
    detail::run_path(std::span<const detail::Kinetics>(kinetics), starts, x, t_end, rng, opts.ceiling,
                     seed.path_index, rec);
    return traj;
}

inline Trajectory simulate(const ReactionNetwork& net, const State& x0, double t_end, SeedSpec seed,
                           const SimulationOptions& opts = {}) {
    const Phase phase{0.0, net};
    return simulate(std::span<const Phase>(&phase, 1), x0, t_end, seed, opts);
}

/// Checks the structural invariants of a trajectory against a network.
/// Returns a description of the first violation, or nothing.
inline std::optional<std::string> validate_trajectory(const Trajectory& traj, const ReactionNetwork& net) {
    if (traj.states.size() != traj.jump_times.size() + 1)
        return "states must have one more entry than jump_times";
    if (traj.channels.size() != traj.jump_times.size())
        return "channels must have one entry per jump";
    for (std::size_t j = 0; j < traj.jump_times.size(); ++j) {
        const double t = traj.jump_times[j];
        if (!(t >= 0.0) || t > traj.t_end)
            return "jump time outside [0, t_end] at jump " + std::to_string(j);
        if (j > 0 && !(t > traj.jump_times[j - 1]))
            return "jump times not strictly increasing at jump " + std::to_string(j);
    }
    for (const auto& s : traj.states) {
        if (s.size() != net.num_species())
            return "state dimension mismatch";
        for (auto v : s.counts)
            if (v < 0)
                return "negative copy number";
    }
    for (std::size_t j = 0; j < traj.jump_times.size(); ++j) {
        const auto k = traj.channels[j];
        if (k >= net.num_reactions())
            return "unknown reaction index at jump " + std::to_string(j);
        const auto zeta = net.stoichiometry(k);
        for (std::size_t i = 0; i < zeta.size(); ++i)
            if (traj.states[j + 1][i] - traj.states[j][i] != zeta[i])
                return "jump " + std::to_string(j) + " is not a stoichiometric displacement";
    }
    return std::nullopt;
}

/// Time-weighted average of each species over [burn_in, t_end].
inline std::vector<double> time_average(const Trajectory& traj, double burn_in) {
    if (!(burn_in < traj.t_end) || burn_in < 0.0)
        throw std::invalid_argument("empty averaging window");
    const std::size_t d = traj.states.front().size();
    std::vector<double> acc(d, 0.0);
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        const double lo = std::max(burn_in, j == 0 ? 0.0 : traj.jump_times[j - 1]);
        const double hi = j < traj.jump_times.size() ? traj.jump_times[j] : traj.t_end;
        if (hi <= lo)
            continue;
        for (std::size_t i = 0; i < d; ++i)
            acc[i] += static_cast<double>(traj.states[j][i]) * (hi - lo);
    }
    for (auto& v : acc)
        v /= traj.t_end - burn_in;
    return acc;
}

/// Time average of one species with a batch-means standard error.
struct TimeAverageEstimate {
    double mean = 0.0;
    double sem = 0.0;
};

inline TimeAverageEstimate time_average_batches(const Trajectory& traj, std::size_t species, double burn_in,
                                                std::size_t batches = 20) {
    if (batches < 2)
        throw std::invalid_argument("need at least two batches");
    const double width = (traj.t_end - burn_in) / static_cast<double>(batches);
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        Trajectory window;
        const double lo = burn_in + width * static_cast<double>(b);
        const double hi = b + 1 == batches ? traj.t_end : lo + width;
        window.t_end = hi;
        window.states.push_back(traj.at(lo));
        auto first = std::upper_bound(traj.jump_times.begin(), traj.jump_times.end(), lo);
        for (auto it = first; it != traj.jump_times.end() && *it <= hi; ++it) {
            const auto j = static_cast<std::size_t>(it - traj.jump_times.begin());
            window.jump_times.push_back(*it);
            window.states.push_back(traj.states[j + 1]);
        }
        window.channels.resize(window.jump_times.size());
        means.push_back(time_average(window, lo)[species]);
    }
    double m = 0.0;
    for (double v : means)
        m += v;
    m /= static_cast<double>(batches);
    double ss = 0.0;
    for (double v : means)
        ss += (v - m) * (v - m);
    return {m, std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches))};
}

} // namespace aic
