#pragma once

#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace fdal {

/// Nodes and weights of a composite rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Composite 8-point Gauss-Legendre rule on [a, b] with `panels` equal panels.
inline QuadratureRule gauss_legendre_panels(double a, double b, std::size_t panels)
{
    using gauss = boost::math::quadrature::gauss<double, 8>;
    const auto& x = gauss::abscissa();
    const auto& w = gauss::weights();
    QuadratureRule r;
    r.nodes.reserve(8 * panels);
    r.weights.reserve(8 * panels);
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width;
        const double half = 0.5 * width;
        // boost stores the nonnegative half of a symmetric rule
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) {
                r.nodes.push_back(mid);
                r.weights.push_back(half * w[i]);
                continue;
            }
            r.nodes.push_back(mid - half * x[i]);
            r.weights.push_back(half * w[i]);
            r.nodes.push_back(mid + half * x[i]);
            r.weights.push_back(half * w[i]);
        }
    }
    return r;
}

} // namespace fdal
