// errors.hpp - exception types shared by every spinsq module
#pragma once

#include <stdexcept>
#include <string>

namespace spinsq {

/// Argument outside the mathematical domain of an operation (negative
/// photon numbers, eta >= 1, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// The second-order expansion divides by |cos X_t| and |sin X_t|.
class SingularPhase : public DomainError {
public:
    SingularPhase(const std::string& factor, double x_t)
        : DomainError("singular setup phase X_t = " + std::to_string(x_t) + ": |" + factor +
                      " X_t| is below the singularity threshold"),
          factor_(factor) {}

    const std::string& factor() const noexcept { return factor_; }

private:
    std::string factor_;
};

/// Bessel series did not reach its truncation threshold within the term budget.
class SeriesOverflow : public std::runtime_error {
public:
    explicit SeriesOverflow(const std::string& what) : std::runtime_error(what) {}
};

/// Problem size above a configured cap (exact sums, oracle).
class SizeError : public std::length_error {
public:
    explicit SizeError(const std::string& what) : std::length_error(what) {}
};

/// Malformed configuration; `where` is "line N" or "[section] key".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(where) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace spinsq
