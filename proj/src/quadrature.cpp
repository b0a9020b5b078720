#include "cellcap/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cellcap::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol)
{
    if (a == b)
        return {0.0, 0.0};
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, 20, rel_tol * 0.1, &err);
    const double allowed = std::max(abs_tol, rel_tol * std::abs(value));
    if (!std::isfinite(value) || !(err <= allowed)) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << a << ", " << b << "]: value " << value
            << ", error estimate " << err << ", allowed " << allowed;
        throw quadrature_error(msg.str(), a, b, value, err);
    }
    return {value, err};
}

double integral(const std::function<double(double)>& f, double a, double b, double abs_tol,
                double rel_tol)
{
    return integrate(f, a, b, abs_tol, rel_tol).value;
}

} // namespace cellcap::quad
