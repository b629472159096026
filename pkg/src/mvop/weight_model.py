"""Weight matrices W = T diag(w_1..w_N) T* and their matrix inner product.

The inner product <P,Q> = int P W Q* dx is evaluated as <PT, QT> against
the diagonal weight: column k of the integrand sees only the scalar weight
w_k, so every integral is a polynomial against one classical weight and a
scalar Gauss rule of sufficient order is exact.  Mixed supports (e.g. a
Hermite next to a Laguerre weight) come for free since each column is
integrated over its own weight's support.
"""

import threading
from dataclasses import dataclass
from math import ceil

import numpy as np
import sympy as sp

from . import scalar_families as sf
from .errors import DegreeCap, InvalidParam
from .matrix_poly import MatrixPolynomial

#: refuse inner products needing more Gauss nodes than this
NODE_CAP = 512


@dataclass(frozen=True)
class WeightSpec:
    """Size N, off-diagonal parameters a_1..a_{N-1}, and N scalar weights."""

    N: int
    a_params: tuple
    scalars: tuple  # N ScalarWeightSpec

    def __post_init__(self):
        if self.N < 2:
            raise InvalidParam("need size N >= 2")
        if len(self.a_params) != self.N - 1:
            raise InvalidParam(f"need {self.N - 1} off-diagonal parameters")
        if any(a == 0 for a in self.a_params):
            raise InvalidParam("all a_i must be nonzero")
        if len(self.scalars) != self.N:
            raise InvalidParam(f"need {self.N} scalar weights")


def weight_spec(a_params, scalars) -> WeightSpec:
    return WeightSpec(N=len(scalars), a_params=tuple(a_params),
                      scalars=tuple(scalars))


def build_nilpotent(spec: WeightSpec, exact: bool = False) -> np.ndarray:
    """The order-two nilpotent A with nonzeros at (2j-1,2j) and (2j+1,2j)."""
    N = spec.N
    A = np.zeros((N, N), dtype=object if exact else complex)
    if exact:
        A[:] = sp.Integer(0)
    a = [sp.nsimplify(v, rational=True) if exact else complex(v)
         for v in spec.a_params]
    for j in range(1, N // 2 + 1):            # a_{2j-1} at (2j-1, 2j)
        A[2 * j - 2, 2 * j - 1] = a[2 * j - 2]
    for j in range(1, (N - 1) // 2 + 1):      # a_{2j} at (2j+1, 2j)
        A[2 * j, 2 * j - 1] = a[2 * j - 1]
    return A


def build_T(spec: WeightSpec, exact: bool = False):
    """T = I + A x and its inverse T^{-1} = I - A x (A^2 = 0)."""
    A = build_nilpotent(spec, exact=exact)
    eye = MatrixPolynomial.identity(spec.N, exact=exact)
    T = eye + MatrixPolynomial([A], exact=exact).shift(1)
    T_inv = eye - MatrixPolynomial([A], exact=exact).shift(1)
    return T, T_inv


def weight_eval(spec: WeightSpec, x: float) -> np.ndarray:
    """W(x) = T(x) diag(w_1(x), ..., w_N(x)) T(x)*; Hermitian PSD."""
    A = build_nilpotent(spec)
    Tx = np.eye(spec.N, dtype=complex) + A * x
    wd = np.array([sf.weight_value(s, x) for s in spec.scalars], dtype=complex)
    return Tx @ np.diag(wd) @ Tx.conj().T


class InnerProductEngine:
    """Caches per-scalar Gauss rules and evaluates <P, Q>_W."""

    def __init__(self, weight: WeightSpec):
        self.weight = weight
        self._T, _ = build_T(weight)
        self._rules = {}
        self._lock = threading.Lock()

    def rule(self, scalar_index: int, m: int):
        key = (scalar_index, m)
        got = self._rules.get(key)
        if got is None:
            got = sf.gauss_rule(self.weight.scalars[scalar_index], m)
            with self._lock:
                self._rules.setdefault(key, got)
        return self._rules[key]

    def inner_product(self, P: MatrixPolynomial,
                      Q: MatrixPolynomial) -> np.ndarray:
        """<P, Q>_W via <PT, QT> against the diagonal weight."""
        PT = (P.to_float() if P.exact else P) * self._T
        QT = (Q.to_float() if Q.exact else Q) * self._T
        return self.inner_product_tilde(PT, QT)

    def inner_product_tilde(self, PT: MatrixPolynomial,
                            QT: MatrixPolynomial) -> np.ndarray:
        """<PT, QT> against diag(w_1..w_N), column by column."""
        N = self.weight.N
        m = ceil((PT.degree + QT.degree) / 2) + 1
        if m > NODE_CAP:
            raise DegreeCap(f"inner product needs {m} > {NODE_CAP} nodes")
        Pc = np.stack([c for c in PT.coeffs])   # (dP+1, N, N)
        Qc = np.stack([c for c in QT.coeffs])
        G = np.zeros((N, N), dtype=complex)
        for k in range(N):
            nodes, weights = self.rule(k, m)
            vp = np.polynomial.polynomial.polyval(nodes, Pc[:, :, k])  # (N, m)
            vq = np.polynomial.polynomial.polyval(nodes, Qc[:, :, k])
            G += (vp * weights) @ vq.conj().T
        return G
