#pragma once

// CSV writers. Numbers use the shortest round-trip representation, so output
// is byte-identical for identical inputs. Columns are gnuplot-friendly: the
// first column is always the abscissa.

#include <charconv>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "aic/dynamics.hpp"
#include "aic/ensemble.hpp"
#include "aic/ode.hpp"
#include "aic/ssa.hpp"

namespace aic {

inline std::string fmt_num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

/// Header `t, <species>..., var_<species>..., cov_<A>_<B>...`. Covariance
/// columns are written for `cov_pairs`; by default only (Z1, Z2) when both exist.
inline void write_ensemble_csv(std::ostream& os, const EnsembleStats& st,
                               std::vector<std::pair<std::size_t, std::size_t>> cov_pairs = {}) {
    if (cov_pairs.empty()) {
        std::size_t z1 = st.species.size(), z2 = st.species.size();
        for (std::size_t i = 0; i < st.species.size(); ++i) {
            if (st.species[i] == "Z1")
                z1 = i;
            if (st.species[i] == "Z2")
                z2 = i;
        }
        if (z1 < st.species.size() && z2 < st.species.size())
            cov_pairs.emplace_back(z1, z2);
    }
    std::vector<const PairSeries*> pairs;
    for (auto [a, b] : cov_pairs)
        if (const auto* p = st.pair(a, b))
            pairs.push_back(p);

    os << 't';
    for (const auto& s : st.species)
        os << ',' << s;
    for (const auto& s : st.species)
        os << ",var_" << s;
    for (const auto* p : pairs)
        os << ",cov_" << st.species[p->a] << '_' << st.species[p->b];
    os << '\n';
    for (std::size_t g = 0; g < st.grid.size(); ++g) {
        os << fmt_num(st.grid[g]);
        for (double m : st.mean[g])
            os << ',' << fmt_num(m);
        for (double v : st.var[g])
            os << ',' << fmt_num(v);
        for (const auto* p : pairs)
            os << ',' << fmt_num(p->cov[g]);
        os << '\n';
    }
}

/// Header `t, <species>...`; one row for the initial state and one per jump.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& species) {
    os << 't';
    for (const auto& s : species)
        os << ',' << s;
    os << '\n';
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        os << fmt_num(j == 0 ? 0.0 : traj.jump_times[j - 1]);
        for (auto c : traj.states[j].counts)
            os << ',' << c;
        os << '\n';
    }
}

inline void write_dense_csv(std::ostream& os, const DenseTrajectory& traj, const std::vector<std::string>& species) {
    os << 't';
    for (const auto& s : species)
        os << ',' << s;
    os << '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << fmt_num(traj.times[i]);
        for (Eigen::Index j = 0; j < traj.states[i].size(); ++j)
            os << ',' << fmt_num(traj.states[i](j));
        os << '\n';
    }
}

/// Header `k, eta, verdict, amplitude, max_real_eig`.
inline void write_bifurcation_csv(std::ostream& os, const BifurcationMap& map) {
    os << "k,eta,verdict,amplitude,max_real_eig\n";
    for (const auto& c : map.cells)
        os << fmt_num(c.k) << ',' << fmt_num(c.eta) << ',' << c.verdict.name() << ',' << fmt_num(c.verdict.amplitude)
           << ',' << fmt_num(c.max_real_eig) << '\n';
}

/// Header `freq, power`.
inline void write_periodogram_csv(std::ostream& os, const std::vector<SpectrumPoint>& spec) {
    os << "freq,power\n";
    for (const auto& p : spec)
        os << fmt_num(p.freq) << ',' << fmt_num(p.power) << '\n';
}

} // namespace aic
