"""Right-acting matrix differential operators D = sum_j d^j . F_j(x).

Application is P . D = sum_j (d^j P)(x) F_j(x).  Composition satisfies
P . (D1 o D2) = (P . D1) . D2.  Conjugation by T = I + A x stays inside
polynomial coefficients because A^2 = 0, so it is done by composing with
the order-zero multiplication operators for T and T^{-1}.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import scalar_families as sf
from .errors import ConditionFailed, SizeMismatch, Unsupported
from .matrix_poly import MatrixPolynomial
from .weight_model import WeightSpec, build_T
from ._poly import binom

CONDITION_TOL = 1e-12


class MatrixDiffOperator:
    """Operator of order m with MatrixPolynomial coefficients F_0..F_m."""

    def __init__(self, f_coeffs, size=None, exact=False):
        f_coeffs = list(f_coeffs)
        if not f_coeffs:
            if size is None:
                raise ValueError("empty operator needs an explicit size")
            f_coeffs = [MatrixPolynomial.zero(size, exact)]
        self.size = f_coeffs[0].size
        self.exact = exact
        if any(f.size != self.size for f in f_coeffs):
            raise SizeMismatch("operator coefficients disagree in size")
        while len(f_coeffs) > 1 and f_coeffs[-1].is_zero():
            f_coeffs.pop()
        self.f_coeffs = f_coeffs

    @property
    def order(self):
        return len(self.f_coeffs) - 1

    def coeff(self, j) -> MatrixPolynomial:
        if 0 <= j < len(self.f_coeffs):
            return self.f_coeffs[j]
        return MatrixPolynomial.zero(self.size, self.exact)

    @classmethod
    def zero(cls, size, exact=False):
        return cls([], size=size, exact=exact)

    @classmethod
    def identity(cls, size, exact=False):
        return cls([MatrixPolynomial.identity(size, exact)], exact=exact)

    @classmethod
    def multiplication(cls, poly: MatrixPolynomial):
        """Order-zero operator P -> P * poly."""
        return cls([poly], exact=poly.exact)

    def __add__(self, other):
        self._check(other)
        m = max(self.order, other.order)
        return MatrixDiffOperator([self.coeff(j) + other.coeff(j)
                                   for j in range(m + 1)],
                                  size=self.size, exact=self.exact)

    def __sub__(self, other):
        self._check(other)
        m = max(self.order, other.order)
        return MatrixDiffOperator([self.coeff(j) - other.coeff(j)
                                   for j in range(m + 1)],
                                  size=self.size, exact=self.exact)

    def __mul__(self, scalar):
        return MatrixDiffOperator([f * scalar for f in self.f_coeffs],
                                  size=self.size, exact=self.exact)

    def is_zero(self):
        return all(f.is_zero() for f in self.f_coeffs)

    def _check(self, other):
        if self.size != other.size:
            raise SizeMismatch(f"sizes {self.size} and {other.size} differ")

    def __repr__(self):
        return f"MatrixDiffOperator(size={self.size}, order={self.order})"

    def to_json(self) -> dict:
        fs = []
        for f in self.f_coeffs:
            fl = f.to_float()
            fs.append([[[ [z.real, z.imag] for z in
                          (complex(c[i, j]) for j in range(f.size))]
                        for i in range(f.size)] for c in fl.coeffs])
        return {"order": self.order, "size": self.size, "F": fs}

    @classmethod
    def from_json(cls, data: dict):
        size = data["size"]
        fs = []
        for fj in data["F"]:
            coeffs = [np.array([[complex(e[0], e[1]) for e in row]
                                for row in ck]) for ck in fj]
            fs.append(MatrixPolynomial(coeffs, size=size))
        return cls(fs, size=size)


def op_apply(P: MatrixPolynomial, D: MatrixDiffOperator) -> MatrixPolynomial:
    """P . D = sum_j (d^j P) F_j."""
    if P.size != D.size:
        raise SizeMismatch(f"sizes {P.size} and {D.size} differ")
    out = MatrixPolynomial.zero(P.size, P.exact)
    for j, fj in enumerate(D.f_coeffs):
        out = out + P.derivative(j) * fj
    return out


def op_compose(D1: MatrixDiffOperator, D2: MatrixDiffOperator) -> MatrixDiffOperator:
    """Composition with P . (D1 o D2) = (P . D1) . D2.

    H_k = sum over i + l = k, l <= j of C(j, l) (d^{j-l} F_i) G_j.
    """
    D1._check(D2)
    exact = D1.exact and D2.exact
    size = D1.size
    m = D1.order + D2.order
    out = [MatrixPolynomial.zero(size, exact) for _ in range(m + 1)]
    for i, fi in enumerate(D1.f_coeffs):
        for j, gj in enumerate(D2.f_coeffs):
            for l in range(j + 1):
                out[i + l] = out[i + l] + fi.derivative(j - l) * gj * binom(j, l)
    return MatrixDiffOperator(out, size=size, exact=exact)


@dataclass(frozen=True)
class EigenvalueMap:
    """Closed-form map n -> diagonal eigenvalue matrix."""

    fn: Callable[[int], np.ndarray]
    description: str = ""

    def __call__(self, n: int) -> np.ndarray:
        return self.fn(n)


def diagonal_operator(scalar_ops, shifts=None, scales=None,
                      exact=False) -> MatrixDiffOperator:
    """Assemble diag(delta_1, ..., delta_N) (+ diagonal constant shifts)."""
    N = len(scalar_ops)
    shifts = shifts or [0.0] * N
    scales = scales or [1.0] * N
    order = max(len(op.fs) for op in scalar_ops) - 1
    fs = []
    for j in range(order + 1):
        entries = []
        for i, op in enumerate(scalar_ops):
            fj = list(op.fs[j]) if j < len(op.fs) else [0]
            fj = [scales[i] * c for c in fj]
            if j == 0:
                fj[0] = fj[0] + shifts[i]
            entries.append(fj)
        deg = max(len(e) for e in entries)
        coeffs = []
        for k in range(deg):
            c = np.zeros((N, N), dtype=complex)
            for i, e in enumerate(entries):
                if k < len(e):
                    c[i, i] = e[k]
            coeffs.append(c)
        fs.append(MatrixPolynomial(coeffs, size=N))
    return MatrixDiffOperator(fs, size=N, exact=exact)


def conjugate_by_T(D_tilde: MatrixDiffOperator, spec: WeightSpec,
                   exact: bool = False) -> MatrixDiffOperator:
    """T D_tilde T^{-1} as a right-acting operator: P -> ((P T) . D_tilde) T^{-1}."""
    T, T_inv = build_T(spec, exact=exact)
    left = MatrixDiffOperator.multiplication(T)
    right = MatrixDiffOperator.multiplication(T_inv)
    return op_compose(op_compose(left, D_tilde), right)


def _check_condition(eigs, shifts, N):
    """Eigenvalue matching of the shifted diagonal operators.

    Requires L_n(slot 2i-1) = L_{n+1}(slot 2i) = L_n(slot 2i+1) where
    L absorbs the constant shifts; the identities are polynomial in n so
    a handful of n values certifies them.
    """
    def lam(i, n):
        return eigs[i](n) + shifts[i]

    for i in range(1, N // 2 + 1):          # 1-based pair indices
        odd, even = 2 * i - 2, 2 * i - 1
        for n in range(4):
            a, b = lam(odd, n), lam(even, n + 1)
            if abs(a - b) > CONDITION_TOL * (1.0 + abs(a)):
                raise ConditionFailed(
                    f"slots {odd + 1},{even + 1}: L_n != L_(n+1) ({a} vs {b})")
    for i in range(1, (N - 1) // 2 + 1):
        even, nxt = 2 * i - 1, 2 * i
        for n in range(4):
            a, b = lam(even, n + 1), lam(nxt, n)
            if abs(a - b) > CONDITION_TOL * (1.0 + abs(a)):
                raise ConditionFailed(
                    f"slots {even + 1},{nxt + 1}: L_(n+1) != L_n ({a} vs {b})")


def build_bispectral_operator(spec: WeightSpec, exact: bool = False):
    """The second-order operator D with Q_n . D = Lambda_n Q_n, plus Lambda.

    Families: all-Laguerre (+1 shift on even slots), all-Hermite (-2 on odd
    slots, matching the explicit 2x2 display), all-Jacobi (+(a1+b1) on even
    slots under the parameter matching condition), and the 2x2 mixed
    Hermite-Laguerre weight (Laguerre operator doubled, Hermite shifted -2).
    """
    fams = [s.family for s in spec.scalars]
    N = spec.N
    if any(f == sf.CUSTOM for f in fams):
        raise Unsupported("bispectral operators need classical scalar weights")

    scalar_ops, eigs = [], []
    for s in spec.scalars:
        op, ev = sf.scalar_diff_operator(s)
        scalar_ops.append(op)
        eigs.append(ev)
    scales = [1.0] * N

    if all(f == sf.LAGUERRE for f in fams):
        shifts = [1.0 if (i + 1) % 2 == 0 else 0.0 for i in range(N)]
    elif all(f == sf.HERMITE for f in fams):
        shifts = [-2.0 if (i + 1) % 2 == 1 else 0.0 for i in range(N)]
    elif all(f == sf.JACOBI for f in fams):
        s1 = spec.scalars[0].alpha + spec.scalars[0].beta
        for j, s in enumerate(spec.scalars, start=1):
            lhs = s.alpha + s.beta + 1 + (-1) ** j
            if abs(lhs - s1) > CONDITION_TOL * (1.0 + abs(s1)):
                raise ConditionFailed(
                    f"Jacobi parameters at slot {j}: alpha+beta+1+(-1)^j = "
                    f"{lhs}, expected {s1}")
        shifts = [s1 if (i + 1) % 2 == 0 else 0.0 for i in range(N)]
    elif N == 2 and fams == [sf.HERMITE, sf.LAGUERRE]:
        shifts = [-2.0, 0.0]
        scales = [1.0, 2.0]
    else:
        raise Unsupported(f"no bispectral construction for families {fams}")

    scaled_eigs = [(lambda n, e=e, s=sc: s * e(n))
                   for e, sc in zip(eigs, scales)]
    _check_condition(scaled_eigs, shifts, N)
    d_tilde = diagonal_operator(scalar_ops, shifts=shifts, scales=scales)
    D = conjugate_by_T(d_tilde, spec)

    def lam(n, _e=tuple(scaled_eigs), _s=tuple(shifts)):
        return np.diag([e(n) + s for e, s in zip(_e, _s)]).astype(complex)

    return D, EigenvalueMap(lam, description="diag of shifted scalar eigenvalues")


def eigencheck(seq, D: MatrixDiffOperator, lam: EigenvalueMap,
               n_max: int) -> dict:
    """Scaled residuals of Q_n . D = Lambda_n Q_n for n <= n_max."""
    worst, worst_n = 0.0, None
    residuals = []
    for n in range(n_max + 1):
        Q = seq.build_Q(n).to_float()
        lhs = op_apply(Q, D)
        rhs = Q.left_mul(lam(n))
        scalemax = max(rhs.max_coeff_norm(), lhs.max_coeff_norm(), 1e-300)
        r = (lhs - rhs).max_coeff_norm() / scalemax
        residuals.append(r)
        if r > worst:
            worst, worst_n = r, n
    return {"max_scaled_residual": worst, "worst_n": worst_n,
            "residuals": residuals}
