"""Recursive block bases for the n-qubit matrix algebra.

Builds the recursive block basis (RBB) of any order d >= 2 from the Pauli
basis, the standard recursive block basis (SRBB) of order 2^n (diagonal
elements replaced by Pauli-Z tensor strings), the index functions f/h that
locate the off-diagonal generators acting on a state pair, and the grouping
of basis indices into the three synthesis factors (Z, even, odd) together
with their transposition sets.

Conventions used throughout the package:

- basis positions j are 1-based;
- state indices are 1-based where the algebra is concerned (alpha, beta)
  and 0-based where bit patterns are concerned;
- qubit 0 is the most significant bit of a state index.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
ID_2 = np.eye(2, dtype=complex)


# ---------------------------------------------------------------------------
# basis containers


@dataclass(frozen=True)
class BasisElement:
    """One basis matrix with its 1-based position."""

    index: int
    matrix: np.ndarray

    def to_json_dict(self) -> dict:
        """JSON form: {"d": int, "j": int, "matrix": [[[re, im], ...], ...]}."""
        d = self.matrix.shape[0]
        rows = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return {"d": d, "j": self.index, "matrix": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


@dataclass(frozen=True)
class Basis:
    """Ordered basis of d*d elements for the order-d matrix algebra."""

    order: int
    elements: tuple[BasisElement, ...]
    kind: str  # "RBB" | "SRBB"

    def __post_init__(self):
        assert len(self.elements) == self.order**2

    def matrix(self, j: int) -> np.ndarray:
        """Element at 1-based position j."""
        return self.elements[j - 1].matrix


def diagonal_positions(d: int) -> list[int]:
    """Positions of the diagonal elements: {m^2 - 1 : 2 <= m <= d} plus d^2."""
    return [m * m - 1 for m in range(2, d + 1)] + [d * d]


# ---------------------------------------------------------------------------
# recursive construction

def _perm_pk(k: int, d: int) -> np.ndarray:
    """Permutation P_(k, d-1): identity with rows k and d-1 swapped (1-based)."""
    p = np.eye(d, dtype=complex)
    if k != d - 1:
        p[[k - 1, d - 2]] = p[[d - 2, k - 1]]
    return p


def _k_sequence(d: int) -> list[int]:
    """Block ordering for the off-diagonal methods: d-1 first, then 1..d-2.

    The leading element is the one whose conjugating permutation is the
    identity.
    """
    return [d - 1] + list(range(1, d - 1))


@lru_cache(maxsize=None)
def _rbb_element(d: int, j: int) -> np.ndarray:
    """Single RBB element, built on demand (memoised per (d, j), read-only)."""
    out = _rbb_element_impl(d, j)
    out.flags.writeable = False
    return out


def _rbb_element_impl(d: int, j: int) -> np.ndarray:
    if d == 2:
        return (SIGMA_1, SIGMA_2, SIGMA_3, ID_2)[j - 1].copy()

    if j == d * d:  # identity caps the basis
        return np.eye(d, dtype=complex)

    if j == d * d - 1:  # new diagonal element
        if d % 2 == 1:
            half = d // 2
            return np.diag(np.concatenate([np.ones(half + 1), -np.ones(half)])).astype(complex)
        half = d // 2 - 1
        sigma = np.concatenate([np.ones(half), -np.ones(half), [1.0, -1.0]])
        return np.diag(sigma).astype(complex)

    base = (d - 1) ** 2
    if j <= base - 1:
        # extend the smaller basis with an alternating corner sign
        out = np.zeros((d, d), dtype=complex)
        out[: d - 1, : d - 1] = _rbb_element(d - 1, j)
        out[d - 1, d - 1] = (-1) ** (d - 1)
        return out

    # new off-diagonal elements: embedded sigma_1 (first d-1 positions) or
    # sigma_2 (next d-1), conjugated into place
    offset = j - base
    if offset < d - 1:
        block_pos, sigma = offset + 1, SIGMA_1
    else:
        block_pos, sigma = offset - (d - 1) + 1, SIGMA_2
    k = _k_sequence(d)[block_pos - 1]
    core = np.zeros((d, d), dtype=complex)
    signs = [(-1) ** l for l in range(d - 2)]  # diag{(-1)^(l-1)}, dimension d-2
    core[: d - 2, : d - 2] = np.diag(signs)
    core[d - 2 :, d - 2 :] = sigma
    p = _perm_pk(k, d)
    return p @ core @ p


def build_rbb(d: int) -> Basis:
    """Recursive block basis of order d (d >= 2)."""
    if d < 2:
        raise ValueError("basis order must be >= 2")
    elems = tuple(BasisElement(j, _rbb_element(d, j)) for j in range(1, d * d + 1))
    return Basis(order=d, elements=elems, kind="RBB")


def z_string(n: int, ordinal: int) -> np.ndarray:
    """Diagonal of the Pauli-Z tensor string for a diagonal ordinal.

    The ordinal's n-bit expansion (qubit 0 = most significant bit) selects
    sigma_3 where the bit is 1 and the identity where it is 0.  Returned as
    the length-2^n diagonal vector.
    """
    diag = np.ones(1)
    for q in range(n):
        bit = (ordinal >> (n - 1 - q)) & 1
        diag = np.kron(diag, np.array([1.0, -1.0]) if bit else np.ones(2))
    return diag


def srbb_element(n: int, j: int) -> np.ndarray:
    """Single SRBB element for 2^n dimensions, built on demand."""
    d = 2**n
    if j == d * d:
        return np.eye(d, dtype=complex)
    # diagonal positions are (D+1)^2 - 1 for ordinal D = 1..d-1
    root = math.isqrt(j + 1)
    if root * root == j + 1 and 2 <= root <= d:
        return np.diag(z_string(n, root - 1)).astype(complex)
    return _rbb_element(d, j)


def build_srbb(n: int) -> Basis:
    """SRBB of order 2^n: the RBB with its diagonals replaced by Z-strings."""
    if n < 1:
        raise ValueError("qubit count must be >= 1")
    d = 2**n
    elems = tuple(BasisElement(j, srbb_element(n, j)) for j in range(1, d * d + 1))
    return Basis(order=d, elements=elems, kind="SRBB")


# ---------------------------------------------------------------------------
# property checks


@dataclass
class PropertyReport:
    """Pass/fail per basis property, plus the worst deviation per numeric check.

    Property letters: a cardinality, b trace, c involution, d spans_su
    (None when the basis order is odd), e diagonal_positions, f identity_last.
    Hermiticity is tracked alongside as an element invariant.
    """

    cardinality: bool
    trace: bool
    involution: bool
    hermitian: bool
    spans_su: bool | None
    diagonal_positions: bool
    identity_last: bool
    max_deviation: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        checks = [self.cardinality, self.trace, self.involution, self.hermitian,
                  self.diagonal_positions, self.identity_last]
        if self.spans_su is not None:
            checks.append(self.spans_su)
        return all(checks)


def check_basis_properties(basis: Basis, tol: float = 1e-12) -> PropertyReport:
    """Verify the defining properties of an RBB/SRBB basis."""
    d = basis.order
    failures: list[str] = []
    dev = {"trace": 0.0, "involution": 0.0, "hermitian": 0.0, "identity_last": 0.0}

    cardinality = len(basis.elements) == d * d
    if not cardinality:
        failures.append("cardinality")

    expected_trace = 0.0 if d % 2 == 0 else 1.0
    eye = np.eye(d)
    for el in basis.elements:
        m = el.matrix
        if el.index <= d * d - 1:
            dev["trace"] = max(dev["trace"], abs(np.trace(m) - expected_trace))
        dev["involution"] = max(dev["involution"], float(np.abs(m @ m - eye).max()))
        dev["hermitian"] = max(dev["hermitian"], float(np.abs(m - m.conj().T).max()))
    trace_ok = dev["trace"] <= tol
    invol_ok = dev["involution"] <= tol
    herm_ok = dev["hermitian"] <= tol
    if not trace_ok:
        failures.append("trace")
    if not invol_ok:
        failures.append("involution")
    if not herm_ok:
        failures.append("hermitian")

    spans: bool | None = None
    if d % 2 == 0:
        # i*B_j for j < d^2 must span the traceless anti-Hermitian algebra:
        # rank of the vectorised real/imag stack equals d^2 - 1
        vecs = np.stack([
            np.concatenate([(1j * el.matrix).real.ravel(), (1j * el.matrix).imag.ravel()])
            for el in basis.elements[: d * d - 1]
        ])
        spans = bool(np.linalg.matrix_rank(vecs) == d * d - 1)
        if not spans:
            failures.append("spans_su")

    diag_pos = set(diagonal_positions(d))
    diag_ok = True
    for el in basis.elements:
        is_diag = float(np.abs(el.matrix - np.diag(np.diag(el.matrix))).max()) <= tol
        if is_diag != (el.index in diag_pos):
            diag_ok = False
    if not diag_ok:
        failures.append("diagonal_positions")

    dev["identity_last"] = float(np.abs(basis.elements[-1].matrix - eye).max())
    ident_ok = dev["identity_last"] <= tol
    if not ident_ok:
        failures.append("identity_last")

    return PropertyReport(
        cardinality=cardinality, trace=trace_ok, involution=invol_ok,
        hermitian=herm_ok, spans_su=spans, diagonal_positions=diag_ok,
        identity_last=ident_ok, max_deviation=dev, failures=failures,
    )


# ---------------------------------------------------------------------------
# index functions and factor grouping

def f_index(p: int, q: int) -> int:
    """(p-1)^2 + (p-1) + (q mod (p-1)): the sigma_2-type element index."""
    if p < 2:
        raise ValueError("p must be >= 2")
    return (p - 1) ** 2 + (p - 1) + q % (p - 1)


def h_index(p: int, q: int) -> int:
    """(p-1)^2 + (q mod (p-1)): the sigma_1-type element index."""
    if p < 2:
        raise ValueError("p must be >= 2")
    return (p - 1) ** 2 + q % (p - 1)


@dataclass(frozen=True)
class FactorGrouping:
    """Partition of the non-identity SRBB indices into synthesis factors.

    z_indices drive the diagonal factor; psi_a_pairs the leading
    block-diagonal even sub-factor; psi_b_quads / phi_quads the conjugated
    even/odd quadruples per factor index x; t_even / t_odd the transposition
    sets realising the conjugations; k_index the wrapping-control qubit of
    each odd factor.
    """

    n: int
    z_indices: tuple[int, ...]
    psi_a_pairs: tuple[tuple[int, int], ...]
    psi_b_quads: dict[int, tuple[tuple[int, int, int, int], ...]]
    phi_quads: dict[int, tuple[tuple[int, int, int, int], ...]]
    t_even: dict[int, tuple[tuple[int, int], ...]]
    t_odd: dict[int, tuple[tuple[int, int], ...]]
    k_index: dict[int, int]


def _k_of(x: int, n: int) -> int:
    """Smallest qubit position whose bit of x is 1 (qubit 0 = MSB of n-1 bits)."""
    return n - 1 - x.bit_length()


def grouping(n: int) -> FactorGrouping:
    """Group the 4^n - 1 non-identity basis indices into the three factors."""
    if n < 2:
        raise ValueError("qubit count must be >= 2")
    d = 2**n

    z_indices = tuple(m * m - 1 for m in range(2, d + 1))
    psi_a = tuple(((2 * m - 1) ** 2, 4 * m * m - 2 * m) for m in range(1, d // 2 + 1))

    psi_b: dict[int, tuple[tuple[int, int, int, int], ...]] = {}
    phi: dict[int, tuple[tuple[int, int, int, int], ...]] = {}
    t_even: dict[int, tuple[tuple[int, int], ...]] = {}
    t_odd: dict[int, tuple[tuple[int, int], ...]] = {}
    k_index: dict[int, int] = {}

    for x in range(1, d // 2):
        k = _k_of(x, n)
        k_index[x] = k

        # even pairs: 1-based even states alpha < beta with
        # (alpha-1) xor (beta-1) = 2x
        evens = []
        for a0 in range(1, d, 2):  # 0-based odd = 1-based even
            b0 = a0 ^ (2 * x)
            if a0 < b0:
                evens.append((a0 + 1, b0 + 1))
        evens.sort()
        t_even[x] = tuple(evens)
        psi_b[x] = tuple(
            (h_index(b, a - 1), f_index(b, a - 1), h_index(b - 1, a), f_index(b - 1, a))
            for a, b in evens
        )

        # odd pairs: 0-based odd a with bit k clear, partner a xor 2x xor 1
        bit_k = 1 << (n - 1 - k)
        odds = []
        for a0 in range(1, d, 2):
            if a0 & bit_k:
                continue
            b0 = a0 ^ (2 * x) ^ 1
            odds.append((a0 + 1, b0 + 1))
        odds.sort()
        t_odd[x] = tuple(odds)
        phi[x] = tuple(
            (h_index(b, a - 1), f_index(b, a - 1), h_index(b + 1, a), f_index(b + 1, a))
            for a, b in odds
        )

    return FactorGrouping(
        n=n, z_indices=z_indices, psi_a_pairs=psi_a, psi_b_quads=psi_b,
        phi_quads=phi, t_even=t_even, t_odd=t_odd, k_index=k_index,
    )


def transposition_matrix(alpha: int, beta: int, d: int) -> np.ndarray:
    """Identity with rows alpha, beta (1-based) swapped."""
    if not (1 <= alpha < beta <= d):
        raise ValueError("need 1 <= alpha < beta <= d")
    p = np.eye(d)
    p[[alpha - 1, beta - 1]] = p[[beta - 1, alpha - 1]]
    return p


# ---------------------------------------------------------------------------
# brute-force approximating operator

def element_exponential(theta: float, u: np.ndarray) -> np.ndarray:
    """exp(i*theta*U) for an involution U, via cos(theta)I + i sin(theta)U."""
    return np.cos(theta) * np.eye(u.shape[0]) + 1j * np.sin(theta) * u


def exact_unitary(n: int, theta: np.ndarray) -> np.ndarray:
    """Single-layer approximating operator Z * Psi * Phi from first principles.

    theta is indexed by basis position: theta[j-1] multiplies element j.
    Factor products run in grouping order (pairs by m, quads by x then by
    increasing first state, h/f alternating within each quad).
    """
    theta = np.asarray(theta, dtype=float)
    d = 2**n
    if theta.shape != (d * d - 1,):
        raise ValueError(f"theta must have length {d * d - 1}")
    g = grouping(n)

    def expo(j: int) -> np.ndarray:
        return element_exponential(theta[j - 1], srbb_element(n, j))

    z = np.eye(d, dtype=complex)
    for j in g.z_indices:
        z = z @ expo(j)

    psi = np.eye(d, dtype=complex)
    for j1, j2 in g.psi_a_pairs:
        psi = psi @ expo(j1) @ expo(j2)
    for x in sorted(g.psi_b_quads):
        for quad in g.psi_b_quads[x]:
            for j in quad:
                psi = psi @ expo(j)

    phi = np.eye(d, dtype=complex)
    for x in sorted(g.phi_quads):
        for quad in g.phi_quads[x]:
            for j in quad:
                phi = phi @ expo(j)

    return z @ psi @ phi
