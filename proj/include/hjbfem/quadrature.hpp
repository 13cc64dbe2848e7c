#pragma once

#include <array>
#include <vector>

namespace hjb {

/// Quadrature on a triangle in barycentric coordinates; weights sum to 1 and
/// are multiplied by the element area at use.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    /// Edge-midpoint rule, exact for quadratics.
    static QuadratureRule edge_midpoint();
    /// One-point centroid rule, exact for linears.
    static QuadratureRule centroid();
};

}  // namespace hjb
