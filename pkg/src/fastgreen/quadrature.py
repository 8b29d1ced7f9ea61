"""Quadrature points for the double surface integral.

The outer (observation) integral uses a symmetric rule on each triangle.
The inner (source) integral uses Gauss-Legendre points along the three
edges of the source triangle, so every triangle contributes ``3 * n``
inner points.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# barycentric points and weights on the reference triangle, weights sum to 1
_A6, _B6 = 0.445948490915965, 0.091576213509771
_WA6, _WB6 = 0.223381589678011, 0.109951743655322
_A7, _B7 = 0.470142064105115, 0.101286507323456
_WA7, _WB7 = 0.132394152788506, 0.125939180544827


def _orbit(a):
    b = 1.0 - 2.0 * a
    return [(b, a, a), (a, b, a), (a, a, b)]


TRIANGLE_RULES = {
    1: ([(1 / 3, 1 / 3, 1 / 3)], [1.0]),
    3: (_orbit(1 / 6), [1 / 3] * 3),
    4: ([(1 / 3, 1 / 3, 1 / 3)] + _orbit(0.2), [-27 / 48] + [25 / 48] * 3),
    6: (_orbit(_A6) + _orbit(_B6), [_WA6] * 3 + [_WB6] * 3),
    7: ([(1 / 3, 1 / 3, 1 / 3)] + _orbit(_A7) + _orbit(_B7), [0.225] + [_WA7] * 3 + [_WB7] * 3),
}

# polynomial degree integrated exactly by each rule
TRIANGLE_RULE_DEGREE = {1: 1, 3: 2, 4: 3, 6: 4, 7: 5}


def triangle_rule(m):
    """Barycentric points (m, 3) and weights (m,) of the m-point rule."""
    if m not in TRIANGLE_RULES:
        raise InvalidInputError(f"no symmetric triangle rule with {m} points; use one of {sorted(TRIANGLE_RULES)}")
    pts, w = TRIANGLE_RULES[m]
    return np.array(pts, dtype=np.float64), np.array(w, dtype=np.float64)


def edge_rule(n):
    """Gauss-Legendre abscissae on [0, 1] and weights summing to 1."""
    if int(n) != n or n < 1:
        raise InvalidInputError("edge rule needs n >= 1 points")
    x, w = np.polynomial.legendre.leggauss(int(n))
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class QuadratureSpec:
    outer_points: int = 4
    inner_points_per_edge: int = 3

    def __post_init__(self):
        triangle_rule(self.outer_points)
        edge_rule(self.inner_points_per_edge)

    @property
    def m(self):
        return self.outer_points

    @property
    def n(self):
        return self.inner_points_per_edge


def outer_points(mesh, m):
    """Observation points (N, m, 3) and area-scaled weights (N, m)."""
    bary, w = triangle_rule(m)
    corners = mesh.corners()
    pts = np.einsum("qi,tij->tqj", bary, corners)
    return np.ascontiguousarray(pts), np.ascontiguousarray(mesh.areas()[:, None] * w[None, :])


def inner_points(mesh, n):
    """Source points (N, 3n, 3) on the triangle edges and length-scaled weights (N, 3n)."""
    s, w = edge_rule(n)
    corners = mesh.corners()
    start = corners
    end = np.roll(corners, -1, axis=1)
    pts = start[:, :, None, :] + s[None, None, :, None] * (end - start)[:, :, None, :]
    lengths = np.linalg.norm(end - start, axis=2)
    weights = lengths[:, :, None] * w[None, None, :]
    N = mesh.N
    return np.ascontiguousarray(pts.reshape(N, 3 * n, 3)), np.ascontiguousarray(weights.reshape(N, 3 * n))
