#ifndef BHLDP_PARAMS_HPP
#define BHLDP_PARAMS_HPP

// Physical constants, the SI -> model-unit derivation chain and the
// dimensionless rate constants (lambda, mu) every other module consumes.

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>

#include "bhldp/errors.hpp"

namespace bhldp {

struct PhysicalConstants {
    double G;      // m^3 kg^-1 s^-2
    double c;      // m s^-1
    double hbar;   // J s
    double sigma;  // emission constant

    // CODATA 2018 G, c, hbar. The emission constant has no agreed value, so
    // the caller must supply it explicitly.
    static PhysicalConstants codata(double sigma) {
        return {6.67430e-11, 299792458.0, 1.054571817e-34, sigma};
    }
};

// Placeholder for the emission constant: the Stefan-Boltzmann value. Only
// used when a caller asks for it by name; never substituted silently.
inline constexpr double placeholder_sigma = 5.670374419e-8;

struct SystemScale {
    double E_total;       // J
    double V;             // m^3
    std::int64_t N;       // total quanta
    double T_horizon;     // model time units
};

struct ModelParams {
    double lambda;        // absorption rate constant
    double mu;            // emission rate constant
    std::int64_t N;       // total quanta
    double T_horizon;     // observation horizon

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// (a, b, a1, a2), kept in extended precision.
struct DerivedCoefficients {
    long double a;
    long double b;
    long double a1;
    long double a2;
};

namespace detail {

inline bool positive_finite(long double v) { return std::isfinite(v) && v > 0.0L; }

inline void require_positive(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
        std::ostringstream os;
        os << name << " must be finite and > 0, got " << v;
        throw invalid_parameter(os.str());
    }
}

inline long double checked(long double v, const char* name) {
    if (!positive_finite(v)) {
        std::ostringstream os;
        os << "intermediate '" << name << "' left the representable range (" << static_cast<double>(v) << ")";
        throw range_error(name, os.str());
    }
    return v;
}

inline double to_model_double(long double v, const char* name) {
    const double d = static_cast<double>(v);
    if (!std::isfinite(d) || d < DBL_MIN) {
        std::ostringstream os;
        os << "'" << name << "' = " << static_cast<double>(v) << " (extended "
           << v << ") is not a normal double";
        throw range_error(name, os.str());
    }
    return d;
}

}  // namespace detail

inline void validate(const PhysicalConstants& pc) {
    detail::require_positive(pc.G, "G");
    detail::require_positive(pc.c, "c");
    detail::require_positive(pc.hbar, "hbar");
    detail::require_positive(pc.sigma, "sigma");
}

inline void validate(const SystemScale& sc) {
    detail::require_positive(sc.E_total, "E");
    detail::require_positive(sc.V, "V");
    detail::require_positive(sc.T_horizon, "T");
    if (sc.N < 2) throw invalid_parameter("N must be >= 2, got " + std::to_string(sc.N));
}

inline void validate(const ModelParams& p) {
    detail::require_positive(p.lambda, "lambda");
    detail::require_positive(p.mu, "mu");
    detail::require_positive(p.T_horizon, "T");
    if (p.N < 2) throw invalid_parameter("N must be >= 2, got " + std::to_string(p.N));
}

/// a = 2G/c^4 (Schwarzschild radius per unit energy), b = hbar c / (4 pi a)
/// (Hawking temperature times energy), a1 = pi c, a2 = 4 pi sigma.
inline DerivedCoefficients derive_coefficients(const PhysicalConstants& pc) {
    validate(pc);
    constexpr long double pi = std::numbers::pi_v<long double>;
    const long double c = pc.c;
    const long double a = detail::checked(2.0L * pc.G / (c * c * c * c), "a");
    const long double b = detail::checked(static_cast<long double>(pc.hbar) * c / (4.0L * pi * a), "b");
    const long double a1 = detail::checked(pi * c, "a1");
    const long double a2 = detail::checked(4.0L * pi * pc.sigma, "a2");
    return {a, b, a1, a2};
}

/// mu = a2 a^2 b^4 / E^3, lambda = a1 a^2 E^2 / V, evaluated in extended
/// precision and narrowed to double at the end.
inline ModelParams model_params_from_physical(const PhysicalConstants& pc, const SystemScale& sc) {
    validate(sc);
    const DerivedCoefficients d = derive_coefficients(pc);
    const long double E = sc.E_total;
    const long double a_sq = detail::checked(d.a * d.a, "a^2");
    const long double b_sq = detail::checked(d.b * d.b, "b^2");
    const long double b_4 = detail::checked(b_sq * b_sq, "b^4");
    const long double e_sq = detail::checked(E * E, "E^2");
    const long double e_cu = detail::checked(e_sq * E, "E^3");
    const long double mu = detail::checked(d.a2 * a_sq * b_4 / e_cu, "mu");
    const long double lambda = detail::checked(d.a1 * a_sq * e_sq / static_cast<long double>(sc.V), "lambda");
    ModelParams p{detail::to_model_double(lambda, "lambda"), detail::to_model_double(mu, "mu"), sc.N,
                  sc.T_horizon};
    validate(p);
    return p;
}

inline ModelParams dimensionless_params(double lambda, double mu, std::int64_t N, double T_horizon) {
    ModelParams p{lambda, mu, N, T_horizon};
    validate(p);
    return p;
}

}  // namespace bhldp

#endif  // BHLDP_PARAMS_HPP
