// Domain error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reserveband {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// sigma = 0 where a strictly positive volatility is required
struct NonPositiveVolatility : Error {
    explicit NonPositiveVolatility(const std::string& msg = "volatility must be positive")
        : Error(msg) {}
};

// r = h/lambda - beta <= 0: selling never pays, no sale barrier exists
struct DegenerateSaleRevenue : Error {
    explicit DegenerateSaleRevenue(const std::string& msg = "unit sale revenue r <= 0")
        : Error(msg) {}
};

// discounted holding cost diverges when the discount rate does not exceed the drift
struct DiscountBelowDrift : Error {
    explicit DiscountBelowDrift(const std::string& msg = "discount rate must exceed drift")
        : Error(msg) {}
};

struct InvalidGrid : Error {
    explicit InvalidGrid(const std::string& msg = "invalid time or space grid") : Error(msg) {}
};

struct NonPositiveArgument : Error {
    explicit NonPositiveArgument(const std::string& msg = "argument must be positive")
        : Error(msg) {}
};

struct SingularSystem : Error {
    explicit SingularSystem(const std::string& msg = "linear system is singular") : Error(msg) {}
};

struct HorizonTooShort : Error {
    explicit HorizonTooShort(const std::string& msg = "discount tail exceeds the configured cap")
        : Error(msg) {}
};

// Aggregates every violated constraint found by model validation.
struct ValidationError : Error {
    std::vector<std::string> violations;

    explicit ValidationError(std::vector<std::string> v)
        : Error(join(v)), violations(std::move(v)) {}

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "model validation failed:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
};

struct ScenarioError : Error {
    explicit ScenarioError(const std::string& msg) : Error(msg) {}
};

}  // namespace reserveband
