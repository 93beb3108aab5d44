#pragma once

#include <stdexcept>
#include <string>

namespace riskbounds {

// Base for all library errors. `code()` is a stable machine-readable tag
// that the CLI copies into its error output.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define RISKBOUNDS_ERROR(Name, tag)                       \
    class Name : public Error {                           \
    public:                                               \
        explicit Name(const std::string& msg)             \
            : Error(tag, msg) {}                          \
    }

RISKBOUNDS_ERROR(InvalidParams, "invalid_params");
RISKBOUNDS_ERROR(InvalidProbability, "invalid_probability");
RISKBOUNDS_ERROR(EmptyIntervalSet, "empty_interval_set");
RISKBOUNDS_ERROR(NonIntegrableTail, "non_integrable_tail");
RISKBOUNDS_ERROR(NonFiniteQuantile, "non_finite_quantile");
RISKBOUNDS_ERROR(ConstraintViolation, "constraint_violation");
RISKBOUNDS_ERROR(InfeasibleConstraint, "infeasible_constraint");
RISKBOUNDS_ERROR(ConditionNotMet, "condition_not_met");
RISKBOUNDS_ERROR(InstanceTooLarge, "instance_too_large");
RISKBOUNDS_ERROR(NonIntegralMass, "non_integral_mass");
RISKBOUNDS_ERROR(ShapeMismatch, "shape_mismatch");
RISKBOUNDS_ERROR(ConfigError, "config_error");

#undef RISKBOUNDS_ERROR

} // namespace riskbounds
