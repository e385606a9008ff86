#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "aic/network.hpp"
#include "aic/random.hpp"
#include "aic/ssa.hpp"

namespace aic {

/// Uniform grid 0, dt, 2dt, ... with t_end appended if it is not hit exactly.
inline std::vector<double> make_grid(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("grid needs positive t_end and dt");
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    std::vector<double> grid;
    grid.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i)
        grid.push_back(static_cast<double>(i) * dt);
    if (grid.back() < t_end - 1e-9 * t_end)
        grid.push_back(t_end);
    else
        grid.back() = std::min(grid.back(), t_end);
    return grid;
}

struct EnsembleOptions {
    std::vector<double> grid;
    std::size_t n_paths = 1000;
    std::uint64_t master_seed = 1;
    unsigned threads = 0; // 0: hardware concurrency
    Count ceiling = kDefaultCeiling;
    /// Window [lo, hi] over which per-reaction firing rates are accumulated.
    std::optional<std::pair<double, double>> rate_window;
    /// Species pairs whose covariance is tracked; empty means all pairs.
    std::vector<std::pair<std::size_t, std::size_t>> cov_pairs;
};

/// Covariance of one species pair over the grid.
struct PairSeries {
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<double> cov;
    std::vector<double> cov_sem;
    std::vector<double> product_mean; // E[X_a X_b]
    std::vector<double> product_sem;
};

struct EnsembleStats {
    std::vector<std::string> species;
    std::vector<double> grid;
    std::size_t n_paths = 0;
    std::vector<std::vector<double>> mean; // [grid][species]
    std::vector<std::vector<double>> var;
    std::vector<std::vector<double>> sem;
    std::vector<PairSeries> pairs;

    std::optional<std::pair<double, double>> rate_window;
    std::vector<std::string> reaction_labels;
    std::vector<double> firing_rate; // mean firings per unit time, per reaction
    std::vector<double> firing_rate_sem;

    std::size_t species_index(const std::string& name) const {
        auto it = std::find(species.begin(), species.end(), name);
        if (it == species.end())
            throw std::out_of_range("no species '" + name + "' in ensemble statistics");
        return static_cast<std::size_t>(it - species.begin());
    }

    const PairSeries* pair(std::size_t a, std::size_t b) const {
        for (const auto& p : pairs)
            if ((p.a == a && p.b == b) || (p.a == b && p.b == a))
                return &p;
        return nullptr;
    }

    bool operator==(const EnsembleStats& o) const {
        auto same_pairs = pairs.size() == o.pairs.size();
        for (std::size_t i = 0; same_pairs && i < pairs.size(); ++i)
            same_pairs = pairs[i].a == o.pairs[i].a && pairs[i].b == o.pairs[i].b && pairs[i].cov == o.pairs[i].cov &&
                         pairs[i].cov_sem == o.pairs[i].cov_sem && pairs[i].product_mean == o.pairs[i].product_mean &&
                         pairs[i].product_sem == o.pairs[i].product_sem;
        return same_pairs && species == o.species && grid == o.grid && n_paths == o.n_paths && mean == o.mean &&
               var == o.var && sem == o.sem && rate_window == o.rate_window && firing_rate == o.firing_rate &&
               firing_rate_sem == o.firing_rate_sem;
    }
};

namespace detail {

inline constexpr std::size_t kBlockPaths = 64;

/// Power sums over the paths of one block. Summation order within a block is
/// path order and blocks are combined in index order, so results do not
/// depend on the number of worker threads.
struct BlockSums {
    std::vector<double> x, xx;                   // [g*d + i]
    std::vector<double> xy, xxy, xyy, xxyy;      // [g*P + p]
    std::vector<double> fire, fire2;             // [k]
    std::exception_ptr error;

    BlockSums(std::size_t G, std::size_t d, std::size_t P, std::size_t K)
        : x(G * d), xx(G * d), xy(G * P), xxy(G * P), xyy(G * P), xxyy(G * P), fire(K), fire2(K) {}
};

class GridSampler {
  public:
    GridSampler(std::span<const double> grid, std::vector<Count>& out) : grid_(grid), out_(out) {}

    void hold(double, double t1, const std::vector<Count>& x) {
        const std::size_t d = x.size();
        // grid points inside [t0, t1) see state x; the last point also closes [t0, t_end]
        while (g_ < grid_.size() && (grid_[g_] < t1 || (t1 >= grid_.back() && grid_[g_] <= t1))) {
            std::copy(x.begin(), x.end(), out_.begin() + static_cast<std::ptrdiff_t>(g_ * d));
            ++g_;
        }
    }
    void jump(double, std::size_t, const std::vector<Count>&) {}

  private:
    std::span<const double> grid_;
    std::vector<Count>& out_;
    std::size_t g_ = 0;
};

template <class Inner>
struct FiringCounter {
    Inner& inner;
    double lo, hi;
    std::vector<Count>& counts;
    void hold(double t0, double t1, const std::vector<Count>& x) { inner.hold(t0, t1, x); }
    void jump(double t, std::size_t k, const std::vector<Count>& x) {
        if (t >= lo && t <= hi)
            ++counts[k];
        inner.jump(t, k, x);
    }
};

} // namespace detail

/// Runs n_paths independent direct-method paths and reduces them to
/// per-grid-point moments. Path i uses the stream SeedSpec{master_seed, i}.
inline EnsembleStats simulate_ensemble(std::span<const Phase> phases, const State& x0, double t_end,
                                       const EnsembleOptions& opts) {
    detail::check_phases(phases, x0, t_end);
    if (opts.n_paths < 2)
        throw std::invalid_argument("an ensemble needs at least two paths");
    if (opts.grid.empty())
        throw std::invalid_argument("empty sampling grid");
    for (std::size_t g = 0; g < opts.grid.size(); ++g) {
        if (opts.grid[g] < 0.0 || opts.grid[g] > t_end)
            throw std::invalid_argument("grid points must lie in [0, t_end]");
        if (g > 0 && !(opts.grid[g] > opts.grid[g - 1]))
            throw std::invalid_argument("grid must be strictly increasing");
    }
    if (opts.rate_window && !(opts.rate_window->second > opts.rate_window->first))
        throw std::invalid_argument("firing-rate window must have positive length");

    const auto& net0 = phases.front().net;
    const std::size_t d = net0.num_species();
    const std::size_t G = opts.grid.size();
    const std::size_t K = net0.num_reactions();
    for (const auto& p : phases)
        if (p.net.num_reactions() != K)
            throw std::invalid_argument("all phases must share the reaction list");

    std::vector<std::pair<std::size_t, std::size_t>> pairs = opts.cov_pairs;
    if (pairs.empty())
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a + 1; b < d; ++b)
                pairs.emplace_back(a, b);
    for (auto [a, b] : pairs)
        if (a >= d || b >= d)
            throw std::invalid_argument("covariance pair out of range");
    const std::size_t P = pairs.size();

    const auto kinetics = detail::compile(phases);
    const auto starts = detail::phase_starts(phases);
    const std::size_t n_blocks = (opts.n_paths + detail::kBlockPaths - 1) / detail::kBlockPaths;
    std::vector<detail::BlockSums> blocks;
    blocks.reserve(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b)
        blocks.emplace_back(G, d, P, K);

    auto run_block = [&](std::size_t b) {
        auto& acc = blocks[b];
        std::vector<Count> samples(G * d);
        std::vector<Count> fired(K);
        const std::size_t first = b * detail::kBlockPaths;
        const std::size_t last = std::min(opts.n_paths, first + detail::kBlockPaths);
        try {
            for (std::size_t path = first; path < last; ++path) {
                PathRng rng(SeedSpec{opts.master_seed, path});
                auto x = x0.counts;
                detail::GridSampler sampler(opts.grid, samples);
                std::fill(fired.begin(), fired.end(), 0);
                if (opts.rate_window) {
                    detail::FiringCounter<detail::GridSampler> counter{sampler, opts.rate_window->first,
                                                                       opts.rate_window->second, fired};
                    detail::run_path(std::span<const detail::Kinetics>(kinetics), starts, x, t_end, rng,
                                     opts.ceiling, path, counter);
                } else {
                    detail::run_path(std::span<const detail::Kinetics>(kinetics), starts, x, t_end, rng,
                                     opts.ceiling, path, sampler);
                }
                for (std::size_t g = 0; g < G; ++g) {
                    const Count* s = samples.data() + g * d;
                    for (std::size_t i = 0; i < d; ++i) {
                        const auto v = static_cast<double>(s[i]);
                        acc.x[g * d + i] += v;
                        acc.xx[g * d + i] += v * v;
                    }
                    for (std::size_t p = 0; p < P; ++p) {
                        const auto u = static_cast<double>(s[pairs[p].first]);
                        const auto v = static_cast<double>(s[pairs[p].second]);
                        acc.xy[g * P + p] += u * v;
                        acc.xxy[g * P + p] += u * u * v;
                        acc.xyy[g * P + p] += u * v * v;
                        acc.xxyy[g * P + p] += u * u * v * v;
                    }
                }
                for (std::size_t k = 0; k < K; ++k) {
                    const auto f = static_cast<double>(fired[k]);
                    acc.fire[k] += f;
                    acc.fire2[k] += f * f;
                }
            }
        } catch (...) {
            acc.error = std::current_exception();
        }
    };

    unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
    if (threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.emplace_back([&] {
                for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    run_block(b);
            });
    }
    for (const auto& blk : blocks)
        if (blk.error)
            std::rethrow_exception(blk.error);

    detail::BlockSums total(G, d, P, K);
    auto add = [](std::vector<double>& into, const std::vector<double>& from) {
        for (std::size_t i = 0; i < into.size(); ++i)
            into[i] += from[i];
    };
    for (const auto& blk : blocks) {
        add(total.x, blk.x);
        add(total.xx, blk.xx);
        add(total.xy, blk.xy);
        add(total.xxy, blk.xxy);
        add(total.xyy, blk.xyy);
        add(total.xxyy, blk.xxyy);
        add(total.fire, blk.fire);
        add(total.fire2, blk.fire2);
    }

    const auto n = static_cast<long double>(opts.n_paths);
    EnsembleStats st;
    st.species = net0.species().names();
    st.grid = opts.grid;
    st.n_paths = opts.n_paths;
    st.mean.assign(G, std::vector<double>(d));
    st.var.assign(G, std::vector<double>(d));
    st.sem.assign(G, std::vector<double>(d));
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t i = 0; i < d; ++i) {
            const long double m = total.x[g * d + i] / n;
            const long double v = std::max(0.0L, (total.xx[g * d + i] - n * m * m) / (n - 1));
            st.mean[g][i] = static_cast<double>(m);
            st.var[g][i] = static_cast<double>(v);
            st.sem[g][i] = static_cast<double>(std::sqrt(v / n));
        }
    for (std::size_t p = 0; p < P; ++p) {
        PairSeries ps;
        ps.a = pairs[p].first;
        ps.b = pairs[p].second;
        for (std::size_t g = 0; g < G; ++g) {
            const std::size_t ia = g * d + ps.a, ib = g * d + ps.b, ip = g * P + p;
            const long double ma = total.x[ia] / n, mb = total.x[ib] / n;
            const long double Exx = total.xx[ia] / n, Eyy = total.xx[ib] / n;
            const long double Exy = total.xy[ip] / n, Exxy = total.xxy[ip] / n, Exyy = total.xyy[ip] / n;
            const long double Exxyy = total.xxyy[ip] / n;
            const long double cov_biased = Exy - ma * mb;
            // fourth central moment E[(x-ma)^2 (y-mb)^2]
            const long double m22 = Exxyy - 2 * mb * Exxy - 2 * ma * Exyy + mb * mb * Exx + ma * ma * Eyy +
                                    4 * ma * mb * Exy - 3 * ma * ma * mb * mb;
            ps.cov.push_back(static_cast<double>(cov_biased * n / (n - 1)));
            ps.cov_sem.push_back(static_cast<double>(std::sqrt(std::max(0.0L, m22 - cov_biased * cov_biased) / n)));
            const long double var_prod = std::max(0.0L, (Exxyy - Exy * Exy) * n / (n - 1));
            ps.product_mean.push_back(static_cast<double>(Exy));
            ps.product_sem.push_back(static_cast<double>(std::sqrt(var_prod / n)));
        }
        st.pairs.push_back(std::move(ps));
    }
    for (const auto& r : net0.reactions())
        st.reaction_labels.push_back(r.label);
    if (opts.rate_window) {
        st.rate_window = opts.rate_window;
        const long double width = opts.rate_window->second - opts.rate_window->first;
        for (std::size_t k = 0; k < K; ++k) {
            const long double m = total.fire[k] / n;
            const long double v = std::max(0.0L, (total.fire2[k] - n * m * m) / (n - 1));
            st.firing_rate.push_back(static_cast<double>(m / width));
            st.firing_rate_sem.push_back(static_cast<double>(std::sqrt(v / n) / width));
        }
    }
    return st;
}

inline EnsembleStats simulate_ensemble(const ReactionNetwork& net, const State& x0, double t_end,
                                       const EnsembleOptions& opts) {
    const Phase phase{0.0, net};
    return simulate_ensemble(std::span<const Phase>(&phase, 1), x0, t_end, opts);
}

} // namespace aic
