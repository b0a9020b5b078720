#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace cellcap::quad {

inline constexpr double default_abs_tol = 1e-10;
inline constexpr double default_rel_tol = 1e-8;

class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& what, double a, double b, double value, double error)
        : std::runtime_error(what), a_(a), b_(b), value_(value), error_(error) {}

    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }
    double value() const noexcept { return value_; }
    double error_estimate() const noexcept { return error_; }

private:
    double a_, b_, value_, error_;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod integration over the finite interval [a, b].
/// Throws quadrature_error when the error estimate exceeds
/// max(abs_tol, rel_tol * |value|).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = default_abs_tol, double rel_tol = default_rel_tol);

/// Value-only convenience wrapper around integrate().
double integral(const std::function<double(double)>& f, double a, double b,
                double abs_tol = default_abs_tol, double rel_tol = default_rel_tol);

} // namespace cellcap::quad
