#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aic {

/// Syntax or semantic error in a reaction file. Line and column are 1-based.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// A copy number crossed the configured ceiling during simulation.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(std::size_t path_index, double time, std::size_t species)
        : std::runtime_error("path " + std::to_string(path_index) +
                             " diverged at t=" + std::to_string(time) +
                             " (species index " + std::to_string(species) + ")"),
          path_index_(path_index), time_(time), species_(species) {}

    std::size_t path_index() const noexcept { return path_index_; }
    double time() const noexcept { return time_; }
    std::size_t species() const noexcept { return species_; }

  private:
    std::size_t path_index_;
    double time_;
    std::size_t species_;
};

/// Linear analysis was requested on a reaction whose propensity is not affine.
class NonAffineError : public std::runtime_error {
  public:
    explicit NonAffineError(std::size_t reaction)
        : std::runtime_error("reaction " + std::to_string(reaction) +
                             " has a non-affine propensity (bimolecular or Hill); "
                             "linear analysis needs a unimolecular network"),
          reaction_(reaction) {}

    std::size_t reaction() const noexcept { return reaction_; }

  private:
    std::size_t reaction_;
};

/// ODE integration failed: step-size underflow or a component went negative.
class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(double time, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}

    double time() const noexcept { return time_; }

  private:
    double time_;
};

} // namespace aic
