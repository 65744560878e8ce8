"""Compilation of the CNOT-reduced single-layer variational circuit.

The circuit factors as Z * Psi * Phi (operator order; gate order is Phi,
Psi, Z).  Phi conjugates odd-parity multiplexed blocks by transposition
CNOT sequences, Psi does the same for even parity and appends one plain
multiplexed block, and Z realises all diagonal rotations through a cyclic
Gray-code CNOT chain per recursion level.

Between consecutive conjugation blocks only the CNOTs that survive pairwise
cancellation are emitted; each block's closing side mirrors its opening side
so the reduced permutation skeleton is exactly the peephole fixpoint of the
naive one.  Free parameters are named `phi/x/slot`, `psi/x/slot`,
`psi/a/slot`, `z/j` — identical between the reduced and naive circuits so
both accept the same assignment.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, circuit_from_gates, cnot, rz, ry


def _gray(t: int) -> int:
    return t ^ (t >> 1)


def _ntz(s: int) -> int:
    return (s & -s).bit_length() - 1


def _bits_of(x: int, n: int) -> list[int]:
    """Qubits where x's (n-1)-bit pattern has a 1; qubit j carries 2^(n-2-j)."""
    return [j for j in range(n - 1) if x & (1 << (n - 2 - j))]


def _k_of(x: int, n: int) -> int:
    """Wrapping-control qubit of the odd factor: position of x's leading bit."""
    return n - 1 - x.bit_length()


# ---------------------------------------------------------------------------
# gate counts


@dataclass(frozen=True)
class GateCounts:
    n_cnot: int
    n_rot: int
    cnot_reduction: int | None = None

    def to_json_dict(self) -> dict:
        return {"n_cnot": self.n_cnot, "n_rot": self.n_rot,
                "cnot_reduction": self.cnot_reduction}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def gate_counts(n: int) -> GateCounts:
    """Closed-form gate counts of the reduced single-layer circuit."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if n == 2:
        return GateCounts(18, 21, 4)
    base = 2 ** (2 * n + 1) - 5 * 2 ** (n - 1)
    return GateCounts(base + 2 * n - 4, base + 1, 2**n * (2 * n - 5) - 2 * n + 8)


def count_from_circuit(circuit: Circuit) -> GateCounts:
    """Tally of actual gates (cnot_reduction is not derivable from a tally)."""
    n_cnot = sum(1 for g in circuit.gates if g.kind == "CNOT")
    n_rot = sum(1 for g in circuit.gates if g.kind in ("RZ", "RY"))
    return GateCounts(n_cnot, n_rot, None)


# ---------------------------------------------------------------------------
# Gray plan and the diagonal factor


@dataclass(frozen=True)
class GrayPlan:
    """Per recursion level m (3..n): the diagonal-element order and the
    one-hot matrix of the single control bit changing between consecutive
    odd-terminated Gray rows (cyclically; the closing row changes bit 0)."""

    n: int
    element_order: dict[int, list[int]]
    change_bit_rows: dict[int, np.ndarray]


def _level_slots(n: int, m: int):
    """(basis index j, control qubit) per slot s = 1..2^(m-1) of level m."""
    rows = 2 ** (m - 1)
    out = []
    for s in range(1, rows + 1):
        dprime = 2 * _gray(s % rows) + 1
        d = dprime << (n - m)
        j = (d + 1) ** 2 - 1
        ctrl = 0 if s == rows else m - 2 - _ntz(s)
        out.append((j, ctrl))
    return out


def gray_plan(n: int) -> GrayPlan:
    if n < 3:
        raise ValueError("n must be >= 3")
    order: dict[int, list[int]] = {}
    rows_by_level: dict[int, np.ndarray] = {}
    for m in range(3, n + 1):
        slots = _level_slots(n, m)
        order[m] = [j for j, _ in slots]
        mat = np.zeros((len(slots), m - 1), dtype=int)
        for i, (_, ctrl) in enumerate(slots):
            mat[i, ctrl] = 1
        rows_by_level[m] = mat
    return GrayPlan(n=n, element_order=order, change_bit_rows=rows_by_level)


def _z_param(n: int, ordinal: int) -> str:
    return f"z/{(ordinal + 1) ** 2 - 1}"


def z_factor(n: int) -> Circuit:
    """CNOT-reduced diagonal factor: 2^n - 1 RZ gates, 2^n - 2 CNOTs."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if n == 2:
        gates = [cnot(0, 1), rz(1, "z/15"), cnot(0, 1), rz(0, "z/8"), rz(1, "z/3")]
        return circuit_from_gates(2, gates)
    gates = []
    for m in range(n, 2, -1):
        for j, ctrl in _level_slots(n, m):
            gates.append(cnot(ctrl, m - 1))
            gates.append(rz(m - 1, f"z/{j}"))
    gates += [cnot(0, 1), rz(1, _z_param(n, 3 * 2 ** (n - 2))),
              cnot(0, 1), rz(1, _z_param(n, 2 ** (n - 2))),
              rz(0, _z_param(n, 2 ** (n - 1)))]
    return circuit_from_gates(n, gates)


def _naive_z_gates(n: int) -> list[Gate]:
    """Unreduced diagonal factor: each Z-string rotation conjugated by its
    own parity chain onto the bottom-most support qubit, ascending order."""
    gates: list[Gate] = []
    for ordinal in range(1, 2**n):
        support = [q for q in range(n) if ordinal & (1 << (n - 1 - q))]
        t = support[-1]
        opens = [cnot(q, t) for q in support[:-1]]
        gates += opens
        gates.append(rz(t, _z_param(n, ordinal)))
        gates += reversed(opens)
    return gates


# ---------------------------------------------------------------------------
# permutation factors


def _perm_even_gates(n: int, x: int, mirror: bool = False) -> list[Gate]:
    targets = _bits_of(x, n)
    if mirror:
        targets = targets[::-1]
    return [cnot(n - 1, j) for j in targets]


def _perm_odd_gates(n: int, x: int, mirror: bool = False) -> list[Gate]:
    k = _k_of(x, n)
    return [cnot(k, n - 1)] + _perm_even_gates(n, x, mirror) + [cnot(k, n - 1)]


def permutation_factor(n: int, x: int, parity: str) -> Circuit:
    """CNOT realisation of the transposition set T_x (opening orientation)."""
    if not 1 <= x <= 2 ** (n - 1) - 1:
        raise ValueError(f"x must be in 1..{2 ** (n - 1) - 1}")
    if parity == "even":
        gates = _perm_even_gates(n, x)
    elif parity == "odd":
        gates = _perm_odd_gates(n, x)
    else:
        raise ValueError("parity must be 'even' or 'odd'")
    return circuit_from_gates(n, gates)


def _even_edge_gates(n: int, x: int) -> list[Gate]:
    """Surviving CNOTs between the x+1 block's closing side and the x
    block's opening side: the shared high bits cancel pairwise."""
    post = _bits_of((x + 1) & ~x, n)
    pre = _bits_of(x & ~(x + 1), n)
    return [cnot(n - 1, j) for j in post + pre]


def _odd_edge_gates(n: int, x: int) -> list[Gate]:
    if (x + 1) & x:
        # shared leading bit => same wrapping control; inner pair cancels too
        k = _k_of(x, n)
        return [cnot(k, n - 1)] + _even_edge_gates(n, x) + [cnot(k, n - 1)]
    return _perm_odd_gates(n, x + 1, mirror=True) + _perm_odd_gates(n, x)


# ---------------------------------------------------------------------------
# multiplexed rotation blocks


def _mux_rows(q: int):
    """(control, is_closing) per slot of a full multiplexor on target q
    controlled by qubits 0..q-1."""
    rows = 2**q
    return [(0 if s == rows else q - 1 - _ntz(s), s == rows) for s in range(1, rows + 1)]


def _mzyz_gates(n: int, names, drop_overall_last: bool = False) -> list[Gate]:
    """Three multiplexed rotation blocks (RZ, RY, RZ) on the last qubit.
    The first two blocks merge away their closing CNOT."""
    gates: list[Gate] = []
    t = n - 1
    for block, kind in enumerate(("RZ", "RY", "RZ")):
        for ctrl, closing in _mux_rows(t):
            gates.append(Gate(kind, (t,), next(names)))
            if closing and (block < 2 or drop_overall_last):
                continue
            gates.append(cnot(ctrl, t))
    return gates


def _name_counter(prefix: str):
    slot = 0
    while True:
        slot += 1
        yield f"{prefix}/{slot}"


def m_zyz(n: int, prefix: str = "m") -> Circuit:
    """ZYZ multiplexed block: 3*2^(n-1) rotations, 3*2^(n-1)-2 CNOTs."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return circuit_from_gates(n, _mzyz_gates(n, _name_counter(prefix)))


def _m_odd_gates(n: int, names) -> list[Gate]:
    pre: list[Gate] = [rz(0, next(names))]
    for q in range(1, n - 1):
        for ctrl, _ in _mux_rows(q):
            pre.append(rz(q, next(names)))
            pre.append(cnot(ctrl, q))
    core = _mzyz_gates(n, names)
    post: list[Gate] = []
    for g in reversed(pre):
        post.append(rz(g.qubits[0], next(names)) if g.kind == "RZ" else g)
    return pre + core + post


def m_odd(n: int, prefix: str = "m") -> Circuit:
    """Multiplexed U(2) block: the ZYZ core wrapped by diagonal pre/post
    scaling cascades.  5*2^(n-1)-2 rotations, 5*2^(n-1)-6 CNOTs."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return circuit_from_gates(n, _m_odd_gates(n, _name_counter(prefix)))


# ---------------------------------------------------------------------------
# the three factors and full circuits


def psi_factor(n: int) -> Circuit:
    if n < 3:
        raise ValueError("n must be >= 3")
    x_max = 2 ** (n - 1) - 1
    gates = _perm_even_gates(n, x_max)
    gates += _mzyz_gates(n, _name_counter(f"psi/{x_max}"))
    for x in range(x_max - 1, 0, -1):
        gates += _even_edge_gates(n, x)
        gates += _mzyz_gates(n, _name_counter(f"psi/{x}"))
    gates += _perm_even_gates(n, 1, mirror=True)
    gates += _mzyz_gates(n, _name_counter("psi/a"))
    return circuit_from_gates(n, gates)


def phi_factor(n: int) -> Circuit:
    if n < 3:
        raise ValueError("n must be >= 3")
    x_max = 2 ** (n - 1) - 1
    gates = _perm_odd_gates(n, x_max)
    gates += _m_odd_gates(n, _name_counter(f"phi/{x_max}"))
    for x in range(x_max - 1, 0, -1):
        gates += _odd_edge_gates(n, x)
        gates += _m_odd_gates(n, _name_counter(f"phi/{x}"))
    gates += _perm_odd_gates(n, 1, mirror=True)
    return circuit_from_gates(n, gates)


def _layer_gates(n: int) -> list[Gate]:
    if n == 2:
        # fixed 2-qubit layout: the generic scheme's four cancelling CNOT
        # pairs are already removed (18 CNOTs, 21 rotations)
        gates = [cnot(0, 1), cnot(1, 0), cnot(0, 1)]
        gates += _mzyz_gates(2, _name_counter("phi/1"), drop_overall_last=True)
        gates += [cnot(1, 0), cnot(0, 1)]
        gates += [cnot(1, 0)]
        gates += _mzyz_gates(2, _name_counter("psi/1"))
        gates += [cnot(1, 0)]
        gates += _mzyz_gates(2, _name_counter("psi/a"), drop_overall_last=True)
        gates += [rz(1, "z/15"), cnot(0, 1), rz(0, "z/8"), rz(1, "z/3")]
        return gates
    return list(phi_factor(n).gates) + list(psi_factor(n).gates) + list(z_factor(n).gates)


def synthesize_circuit(n: int, layers: int = 1) -> Circuit:
    """The reduced single-layer circuit (gate order Phi, Psi, Z); layers > 1
    repeats the layer with fresh `L<i>/`-prefixed parameters."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if layers < 1:
        raise ValueError("layers must be >= 1")
    layer = _layer_gates(n)
    if layers == 1:
        return circuit_from_gates(n, layer)
    gates: list[Gate] = []
    for i in range(1, layers + 1):
        for g in layer:
            if isinstance(g.param, str):
                g = Gate(g.kind, g.qubits, f"L{i}/{g.param}")
            gates.append(g)
    return circuit_from_gates(n, gates)


def naive_circuit(n: int) -> Circuit:
    """Unreduced equivalence oracle: every transposition set emitted in full
    on both sides of its block (closing side mirrored), diagonal factor in
    ascending index order.  Shares parameter names with the reduced circuit."""
    if n < 3:
        raise ValueError("n must be >= 3")
    x_max = 2 ** (n - 1) - 1
    gates: list[Gate] = []
    for x in range(x_max, 0, -1):
        gates += _perm_odd_gates(n, x)
        gates += _m_odd_gates(n, _name_counter(f"phi/{x}"))
        gates += _perm_odd_gates(n, x, mirror=True)
    for x in range(x_max, 0, -1):
        gates += _perm_even_gates(n, x)
        gates += _mzyz_gates(n, _name_counter(f"psi/{x}"))
        gates += _perm_even_gates(n, x, mirror=True)
    gates += _mzyz_gates(n, _name_counter("psi/a"))
    gates += _naive_z_gates(n)
    return circuit_from_gates(n, gates)
