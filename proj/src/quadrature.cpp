#include "hjbfem/quadrature.hpp"

namespace hjb {

QuadratureRule QuadratureRule::edge_midpoint() {
    return {{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 2};
}

QuadratureRule QuadratureRule::centroid() {
    return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}, 1};
}

}  // namespace hjb
