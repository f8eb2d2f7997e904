#pragma once

#include <stdexcept>
#include <string>

namespace qdirac {

// Configuration / contract violations. The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failures (bracket loss, non-convergence, overflow). Exit code 3.
class NumericError : public std::runtime_error {
public:
    enum class Kind {
        BracketFailure,
        NonConvergence,
        Overflow,
        DegenerateNormalization,
    };

    NumericError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

    const char* kind_name() const {
        switch (kind_) {
            case Kind::BracketFailure: return "bracket_failure";
            case Kind::NonConvergence: return "non_convergence";
            case Kind::Overflow: return "overflow";
            case Kind::DegenerateNormalization: return "degenerate_normalization";
        }
        return "unknown";
    }

private:
    Kind kind_;
};

}  // namespace qdirac
