#ifndef BHLDP_ERRORS_HPP
#define BHLDP_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bhldp {

// Non-positive rates, N < 2 and similar.
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// State or argument outside the domain of a formula (x <= 0, k > N, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An intermediate of the SI derivation chain left the representable range.
class range_error : public std::range_error {
public:
    range_error(std::string intermediate, const std::string& what)
        : std::range_error(what), intermediate_(std::move(intermediate)) {}
    const std::string& intermediate() const noexcept { return intermediate_; }

private:
    std::string intermediate_;
};

// Adaptive step size underflowed while x approached the 1/x^2 singularity.
class singular_approach : public std::runtime_error {
public:
    singular_approach(double t, const std::string& what)
        : std::runtime_error(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

// More than one sign change of the stationary-regime equation.
class regime_ambiguity : public std::runtime_error {
public:
    regime_ambiguity(std::vector<std::pair<double, double>> brackets, const std::string& what)
        : std::runtime_error(what), brackets_(std::move(brackets)) {}
    const std::vector<std::pair<double, double>>& brackets() const noexcept { return brackets_; }

private:
    std::vector<std::pair<double, double>> brackets_;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bhldp

#endif  // BHLDP_ERRORS_HPP
