#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsync {

using Vec = std::vector<double>;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error { public: using Error::Error; };
class NonPositiveDefinite : public Error { public: using Error::Error; };
class OutOfWindow : public Error { public: using Error::Error; };
class DegeneratePath : public Error { public: using Error::Error; };
class InsufficientSupport : public Error { public: using Error::Error; };
class RegularityViolation : public Error { public: using Error::Error; };
class GridMismatch : public Error { public: using Error::Error; };
class StepExplosion : public Error { public: using Error::Error; };

/// Configuration/schema failure carrying the offending field path.
class ConfigError : public Error {
public:
    ConfigError(std::string field_path, const std::string& message)
        : Error("config error at '" + field_path + "': " + message),
          field_(std::move(field_path)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Hurst parameter restricted to the persistent regime (1/2, 1).
class HurstParameter {
public:
    explicit HurstParameter(double value) : value_(value) {
        if (!(value > 0.5 && value < 1.0))
            throw Error("Hurst parameter must lie in the open interval (0.5, 1), got " +
                        std::to_string(value));
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline double distance_sq(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const Vec& a, const Vec& b) { return std::sqrt(distance_sq(a, b)); }

}  // namespace fracsync
