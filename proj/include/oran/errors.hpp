#pragma once

#include <stdexcept>
#include <string>

namespace oran {

/// Invalid input parameter. The message names the offending field.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Argument outside the mathematical domain of a model (e.g. log of a non-positive distance).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The instance admits no feasible solution (structurally or by search).
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace oran
