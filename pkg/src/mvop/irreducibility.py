"""Order-zero symmetries F W(x) = W(x) F* and explicit reductions.

A constant nonsingular F commuting with the weight in this twisted sense
witnesses a congruence of W to a direct sum; the identity always works, so
a symmetry space of dimension 1 means no order-zero reduction was
detected.  The defining relation is linear in (Re F, Im F) and is imposed
at sample points spread over the support, which is equivalent to the
functional identity because every entry of W is a polynomial times the
scalar densities.
"""

from dataclasses import dataclass, field
from math import inf
from typing import Optional

import numpy as np

from . import scalar_families as sf
from .errors import InvalidParam, Unsupported
from .weight_model import WeightSpec, weight_eval

NULL_TOL = 1e-10
VALIDATE_TOL = 1e-9


def _truncated_support(spec: WeightSpec):
    """Interval covering every scalar support, with exponential tails cut
    where the densities are below roughly 1e-12 of their peak."""
    lo, hi = inf, -inf
    for s in spec.scalars:
        slo, shi = s.support
        if slo == -inf:
            slo = (s.b if s.family == sf.HERMITE else 0.0) - 6.5
        if shi == inf:
            if s.family == sf.HERMITE:
                shi = s.b + 6.5
            else:
                shi = max(70.0, 4.0 * max(s.alpha, 0.0) + 50.0)
        lo, hi = min(lo, slo), max(hi, shi)
    return lo, hi


def _chebyshev_points(lo, hi, m, phase=0.0):
    k = np.arange(m)
    t = np.cos((k + 0.5 + phase) * np.pi / m)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


@dataclass
class SymmetrySpace:
    """Real span of constant matrices F with F W(x) = W(x) F* on the support."""

    dimension: int
    basis: list = field(repr=False)
    sample_points: list = field(repr=False)
    singular_values: list = field(repr=False)
    validation_residual: float = 0.0

    @property
    def reducible_at_order_zero(self) -> bool:
        return self.dimension >= 2

    def to_json(self) -> dict:
        return {"dimension": self.dimension,
                "validation_residual": self.validation_residual,
                "basis": [[[[z.real, z.imag] for z in row] for row in F]
                          for F in self.basis]}


def _relation_block(W: np.ndarray) -> np.ndarray:
    """Real matrix of the map (Re F, Im F) -> (Re G, Im G), G = FW - WF*.

    Column order: real parts of F (row-major), then imaginary parts.
    """
    N = W.shape[0]
    cols = np.zeros((2 * N * N, N, N), dtype=complex)
    idx = 0
    for part in (0, 1):
        for p in range(N):
            for q in range(N):
                G = cols[idx]
                if part == 0:       # F = E_pq
                    G[p, :] += W[q, :]
                    G[:, p] -= W[:, q]
                else:               # F = i E_pq
                    G[p, :] += 1j * W[q, :]
                    G[:, p] += 1j * W[:, q]
                idx += 1
    flat = cols.reshape(2 * N * N, N * N).T      # (N^2, 2N^2)
    return np.vstack([flat.real, flat.imag])     # (2N^2, 2N^2)


def order_zero_symmetries(spec: WeightSpec,
                          n_points: Optional[int] = None) -> SymmetrySpace:
    """Orthonormal basis of constant solutions of F W(x) = W(x) F*."""
    N = spec.N
    min_pts = 2 * N * N + 2
    if n_points is None:
        n_points = max(min_pts, 4 * N * N + 10)
    if n_points < min_pts:
        raise InvalidParam(f"need n_points >= {min_pts}")

    lo, hi = _truncated_support(spec)
    xs = _chebyshev_points(lo, hi, n_points)
    blocks, used = [], []
    for x in xs:
        W = weight_eval(spec, float(x))
        top = np.max(np.abs(W))
        if top < 1e-280:
            continue
        blocks.append(_relation_block(W) / top)
        used.append(float(x))
    if len(used) < min_pts:
        raise InvalidParam("support sampling left too few usable points")

    mat = np.vstack(blocks)
    _, svals, vt = np.linalg.svd(mat, full_matrices=False)
    null = svals <= NULL_TOL * svals[0]
    basis = []
    for v in vt[null]:
        basis.append((v[:N * N] + 1j * v[N * N:]).reshape(N, N))

    # defining relation re-checked on twice as many fresh points
    worst = 0.0
    fresh = _chebyshev_points(lo, hi, 2 * n_points, phase=0.25)
    for x in fresh:
        W = weight_eval(spec, float(x))
        top = np.max(np.abs(W))
        if top < 1e-280:
            continue
        for F in basis:
            r = np.max(np.abs(F @ W - W @ F.conj().T)) / top
            worst = max(worst, r)
    if worst > VALIDATE_TOL:
        raise InvalidParam(f"symmetry basis failed validation ({worst:.2e}); "
                           "increase n_points")
    return SymmetrySpace(dimension=len(basis), basis=basis,
                         sample_points=used,
                         singular_values=list(svals),
                         validation_residual=worst)


def _sample_inside(support, m=20):
    lo, hi = support
    lo = max(lo, -50.0) if lo != -inf else -8.0
    hi = min(hi, 50.0) if hi != inf else 8.0
    return _chebyshev_points(lo, hi, m, phase=0.1)


def try_reduce_2x2(spec: WeightSpec):
    """Scalar-sum reduction of a 2x2 weight, if w1/w2 = -a^2 (x-b)(x-c)
    with the support inside (b, c).

    Returns (b, c, M, description) with M W M* diagonal, or None.
    """
    if spec.N != 2:
        raise Unsupported("needs a 2x2 weight")
    w1, w2 = spec.scalars
    if w1.family == sf.CUSTOM or w2.family == sf.CUSTOM:
        raise Unsupported("needs classical scalar weights")
    if w1.support != w2.support:
        return None
    a = float(np.real(spec.a_params[0]))

    xs = _sample_inside(w1.support, 5)
    ratio = np.array([sf.weight_value(w1, x) / sf.weight_value(w2, x)
                      for x in xs])
    q = np.polynomial.polynomial.polyfit(xs, ratio, 2)

    xv = _sample_inside(w1.support, 20)
    rv = np.array([sf.weight_value(w1, x) / sf.weight_value(w2, x)
                   for x in xv])
    fit = np.polynomial.polynomial.polyval(xv, q)
    scale = np.max(np.abs(rv))
    if np.max(np.abs(fit - rv)) > 1e-10 * scale:
        return None                      # ratio is not a quadratic
    if abs(q[2] + a * a) > 1e-8 * a * a:
        return None                      # wrong leading coefficient
    roots = np.roots([q[2], q[1], q[0]])
    if np.max(np.abs(roots.imag)) > 1e-8 * (1 + np.max(np.abs(roots))):
        return None
    b, c = sorted(roots.real)
    lo, hi = w1.support
    if lo < b - 1e-9 or hi > c + 1e-9 or lo == -inf or hi == inf:
        return None                      # support not inside (b, c)

    M = np.array([[1.0 / (a * (b - c)), -b / (b - c)],
                  [1.0, -a * c]])
    for x in xv:
        W = weight_eval(spec, float(x))
        D = M @ W @ M.conj().T
        off = max(abs(D[0, 1]), abs(D[1, 0]))
        if off > 1e-10 * np.max(np.abs(D)):
            return None
    desc = ("W congruent to diag(w2(x)(x-b)/(c-b), a^2 w2(x)(c-b)(c-x)) "
            f"with b={b:.12g}, c={c:.12g}")
    return b, c, M, desc


def try_reduce_3x3_w1w3(spec: WeightSpec):
    """Split of a 3x3 weight with w1 = w3 into a scalar plus a 2x2 block.

    Returns (M, description); M W M* = diag((a1^2+a2^2)/a2^2 w1, 2x2 block).
    """
    if spec.N != 3:
        raise Unsupported("needs a 3x3 weight")
    w1, w2, w3 = spec.scalars
    if w1 != w3:
        raise Unsupported("needs w1 = w3 (same family and parameters)")
    a1, a2 = (float(np.real(a)) for a in spec.a_params)
    s = a1 * a1 + a2 * a2
    M = np.array([[1.0, 0.0, -a1 / a2],
                  [0.0, 1.0, 0.0],
                  [a1 * a2 / s, 0.0, a2 * a2 / s]])

    lo = min(w.support[0] for w in spec.scalars)
    hi = max(w.support[1] for w in spec.scalars)
    for x in _sample_inside((lo, hi), 20):
        W = weight_eval(spec, float(x))
        D = M @ W @ M.conj().T
        off = max(abs(D[0, 1]), abs(D[0, 2]),
                  abs(D[1, 0]), abs(D[2, 0]))
        top = np.max(np.abs(D))
        if off > 1e-10 * top:
            raise InvalidParam("block structure failed numeric verification")
        want = s / (a2 * a2) * sf.weight_value(w1, float(x))
        if abs(D[0, 0] - want) > 1e-10 * max(top, abs(want)):
            raise InvalidParam("scalar block failed numeric verification")
    desc = ("W congruent to diag((a1^2+a2^2)/a2^2 w1(x), "
            "[[w2, a2 x w2], [a2 x w2, a2^2 x^2 w2 + a2^2/(a1^2+a2^2) w2]])")
    return M, desc
