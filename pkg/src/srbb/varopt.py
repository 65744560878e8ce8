"""Losses, phase recovery and optimizers for fitting basis circuits to targets.

Metric conventions used throughout:

* ``trace_distance`` implements the full trace norm tr sqrt((rho-sigma)^dag
  (rho-sigma)) with no 1/2 prefactor, so pure orthogonal states are at
  distance 2, not 1.
* ``fidelity`` is the similarity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; as a
  training loss it enters as 1 - fidelity.
* Batch losses are averaged over the batch.

Training is deterministic for a given seed: all randomness (parameter
initialization, state datasets, holdout states) flows from one SeedSequence,
and batch reductions happen in fixed index order.  Setting SRBB_THREADS > 1
lets batch evaluation fan out across threads; the per-state loss vector is
assembled in index order before the single reduction, so results do not
depend on thread scheduling.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, ParamTable, unitary_of
from .compiler import synthesize_circuit

LOSSES = ("frobenius", "trace", "fidelity")
OPTIMIZERS = ("nm", "nelder_mead", "adam")


def frobenius_loss(a: np.ndarray, b: np.ndarray) -> float:
    """sqrt(tr((A-B)(A-B)^dag)): the Frobenius norm of the difference."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def _check_density(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix must be positive semidefinite")
    return rho


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Full trace norm of rho - sigma (no 1/2 factor), via eigendecomposition."""
    rho = _check_density(rho)
    sigma = _check_density(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    return float(np.abs(np.linalg.eigvalsh(rho - sigma)).sum())


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via Hermitian eigendecompositions."""
    rho = _check_density(rho)
    sigma = _check_density(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    w, v = np.linalg.eigh(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = np.linalg.eigvalsh(sqrt_rho @ sigma @ sqrt_rho)
    f = np.sqrt(np.clip(inner, 0.0, None)).sum() ** 2
    return float(min(max(f, 0.0), 1.0))


def _check_unitary(u: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("matrix must be square")
    d = u.shape[0]
    if np.linalg.norm(u.conj().T @ u - np.eye(d)) > tol:
        raise ValueError("matrix is not unitary")
    return u


def _det_roots(u: np.ndarray) -> np.ndarray:
    """All d-th complex roots of det(u), principal root first."""
    d = u.shape[0]
    principal = np.exp(np.log(np.linalg.det(u).astype(complex)) / d)
    return principal * np.exp(2j * np.pi * np.arange(d) / d)


def su_projections(u: np.ndarray) -> list[np.ndarray]:
    """u divided by each d-th root of its determinant; every result has det 1."""
    u = _check_unitary(u)
    return [u / r for r in _det_roots(u)]


def phase_recovery(su_approx: np.ndarray, u_ideal: np.ndarray) -> np.ndarray:
    """Undo the determinant-root rescaling that maps u_ideal closest to su_approx.

    Among the special-unitary projections of u_ideal, the one nearest
    su_approx in Frobenius distance identifies the phase the training
    discarded; multiplying su_approx by that root returns an approximation of
    u_ideal itself.
    """
    su_approx = np.asarray(su_approx, dtype=complex)
    u_ideal = _check_unitary(u_ideal)
    roots = _det_roots(u_ideal)
    dists = [np.linalg.norm(su_approx - u_ideal / r) for r in roots]
    return su_approx * roots[int(np.argmin(dists))]


def _nearest_su(u: np.ndarray) -> np.ndarray:
    """SU projection of u nearest the identity.

    Ties (equidistant roots) go to the root with the smallest principal
    argument, which keeps the choice deterministic.
    """
    roots = _det_roots(u)
    dists = np.array([np.linalg.norm(u / r - np.eye(u.shape[0])) for r in roots])
    best = dists.min()
    tied = [r for r, dd in zip(roots, dists) if dd - best < 1e-12]
    root = min(tied, key=lambda r: np.angle(r))
    return u / root


def amplitude_encode(x, n: int) -> np.ndarray:
    """Normalize a real vector of length 2^n into state amplitudes."""
    x = np.asarray(x, dtype=float)
    if x.shape != (2**n,):
        raise ValueError(f"vector must have length {2**n}")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ValueError("cannot encode the zero vector")
    return (x / norm).astype(complex)


def random_states(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, d) array of Haar-random pure states (normalized complex Gaussians)."""
    z = rng.normal(size=(count, d)) + 1j * rng.normal(size=(count, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def hellinger(p, q) -> float:
    """sqrt(1 - sum sqrt(p_i q_i)) after normalizing both histograms."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("histograms must have equal support size")
    if (p < 0).any() or (q < 0).any():
        raise ValueError("histogram entries must be non-negative")
    ps, qs = p.sum(), q.sum()
    if ps == 0 or qs == 0:
        raise ValueError("cannot normalize an all-zero histogram")
    bc = np.sqrt(p / ps).dot(np.sqrt(q / qs))
    return float(math.sqrt(max(0.0, 1.0 - bc)))


def fd_gradient(objective, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient, one coordinate at a time."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (objective(x + e) - objective(x - e)) / (2.0 * step)
    return g


# ---------------------------------------------------------------------------
# optimizers


def nelder_mead(objective, x0, max_iter: int = 10000, tol: float = 1e-12,
                callback=None) -> tuple[np.ndarray, float]:
    """Downhill simplex with reflection 1, expansion 2, contraction and
    shrink 0.5.  Stops when the simplex spread (worst-to-best distance in
    both x and f) falls below tol, or after max_iter iterations.  A NaN
    objective value aborts with a diagnostic."""
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size

    evals = [0]

    def f(x):
        v = float(objective(x))
        evals[0] += 1
        if math.isnan(v):
            raise RuntimeError(
                f"objective returned NaN after {evals[0]} evaluations at x={x!r}")
        return v

    # scipy-style initial simplex: 5% bump per coordinate, absolute for zeros
    simplex = [x0]
    for i in range(dim):
        p = x0.copy()
        p[i] = p[i] * 1.05 if p[i] != 0.0 else 0.00025
        simplex.append(p)
    simplex = np.array(simplex)
    fvals = np.array([f(p) for p in simplex])

    for it in range(max_iter):
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if callback is not None:
            callback(fvals[0])
        spread_x = np.abs(simplex[1:] - simplex[0]).max()
        spread_f = np.abs(fvals[1:] - fvals[0]).max()
        if max(spread_x, spread_f) < tol:
            break

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = f(xr)
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + 0.5 * (xr - centroid)
                fc = f(xc)
                accept = fc <= fr
            else:
                xc = centroid + 0.5 * (worst - centroid)
                fc = f(xc)
                accept = fc < fvals[-1]
            if accept:
                simplex[-1], fvals[-1] = xc, fc
            else:
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                fvals[1:] = [f(p) for p in simplex[1:]]

    best = int(np.argmin(fvals))
    return simplex[best].copy(), float(fvals[best])


def adam(objective, x0, steps: int = 100, lr: float = 0.01, beta1: float = 0.9,
         beta2: float = 0.999, eps: float = 1e-8, fd_step: float = 1e-6,
         callback=None) -> tuple[np.ndarray, float]:
    """Adam with central finite-difference gradients.

    ``objective`` is either a single callable f(x) or an iterable yielding one
    callable per step (mini-batches).  A NaN loss or gradient aborts.
    Returns the best (x, f) seen over the recorded step losses."""
    x = np.asarray(x0, dtype=float).copy()
    stream = itertools.repeat(objective, steps) if callable(objective) \
        else itertools.islice(iter(objective), steps)
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    best_x, best_f = x.copy(), math.inf
    for t, fstep in enumerate(stream, start=1):
        fx = float(fstep(x))
        if math.isnan(fx):
            raise RuntimeError(f"loss became NaN at step {t}")
        if fx < best_f:
            best_x, best_f = x.copy(), fx
        if callback is not None:
            callback(fx)
        g = fd_gradient(fstep, x, fd_step)
        if np.isnan(g).any():
            raise RuntimeError(f"gradient became NaN at step {t}")
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        mhat = m / (1.0 - beta1**t)
        vhat = v / (1.0 - beta2**t)
        x = x - lr * mhat / (np.sqrt(vhat) + eps)
    return best_x, best_f


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    """Knobs for a training run.

    loss: frobenius | trace | fidelity.  optimizer: nm (alias nelder_mead) |
    adam.  dataset_size/batch apply to the state-evolution losses; epochs and
    batch also fix Adam's step count (epochs * ceil(dataset_size / batch))
    for every loss.  max_iter/tol bound a single Nelder-Mead run; restarts
    re-launch it from the incumbent best with a fresh simplex (which undoes
    simplex collapse and resumes descent) until target_loss is reached or the
    restart budget is spent.
    """

    loss: str = "frobenius"
    optimizer: str = "nm"
    seed: int = 0
    dataset_size: int = 1000
    batch: int = 64
    lr: float = 0.01
    epochs: int = 20
    max_iter: int | None = None
    tol: float = 1e-12
    restarts: int = 8
    target_loss: float = 1e-8

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.dataset_size <= 0 or self.batch <= 0 or self.epochs <= 0:
            raise ValueError("sizes must be positive")
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")


@dataclass
class TrainReport:
    """Result of a training run.

    final_loss carries all three metrics evaluated on the trained circuit:
    'frobenius' against the phase-recovered unitary, while 'trace' and
    'fidelity' (as 1 - F) are evaluated through density-matrix evolution of
    ten held-out states — 'trace' is the max over those states and doubles as
    the evolution check.
    """

    final_loss: dict[str, float]
    best_params: ParamTable
    recovered_unitary: np.ndarray
    wall_time: float
    loss_trace: list[float] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        u = self.recovered_unitary
        return {
            "loss": dict(self.final_loss),
            "params": list(self.best_params.values),
            "unitary": [[[float(z.real), float(z.imag)] for z in row] for row in u],
            "wall_ms": self.wall_time * 1000.0,
            "trace_of_loss": list(self.loss_trace),
        }

    def to_json(self, indent: int | None = None) -> str:
        import json

        return json.dumps(self.to_json_dict(), indent=indent)


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("SRBB_THREADS", "1")))
    except ValueError:
        return 1


def _evolved_overlaps(u_circ: np.ndarray, u_ideal: np.ndarray,
                      states: np.ndarray) -> np.ndarray:
    """|<psi U_circ^dag U_ideal psi>|^2 per state row, in index order."""
    cap = _thread_cap()
    if cap > 1 and len(states) >= 2 * cap:
        chunks = np.array_split(states, cap)
        with ThreadPoolExecutor(cap) as ex:
            parts = list(ex.map(
                lambda s: np.abs(np.einsum("ij,ij->i", (s @ u_circ.T).conj(),
                                           s @ u_ideal.T)) ** 2, chunks))
        return np.concatenate(parts)
    a = states @ u_circ.T
    b = states @ u_ideal.T
    return np.abs(np.einsum("ij,ij->i", a.conj(), b)) ** 2


def _make_objective(circuit: Circuit, names: tuple[str, ...], loss: str,
                    target_su: np.ndarray, states: np.ndarray | None):
    """Loss as a function of the flat parameter vector.

    For pure states the printed density formulas collapse to overlap
    expressions — trace distance 2 sqrt(1-F), fidelity loss 1-F with
    F = |<psi_circ|psi_ideal>|^2 — which is what the hot loop evaluates.
    """
    if loss == "frobenius":
        def objective(x):
            u = unitary_of(circuit, dict(zip(names, x)))
            return float(np.linalg.norm(u - target_su))
        return objective

    def objective(x):
        u = unitary_of(circuit, dict(zip(names, x)))
        ov = _evolved_overlaps(u, target_su, states)
        if loss == "trace":
            return float(np.mean(2.0 * np.sqrt(np.clip(1.0 - ov, 0.0, None))))
        return float(np.mean(1.0 - ov))

    return objective


def train(n: int, target_unitary: np.ndarray, cfg: TrainConfig) -> TrainReport:
    """Fit the n-qubit layer circuit to a target unitary.

    The target is projected to its nearest-identity SU representative for
    optimization; the report's recovered_unitary has the discarded phase put
    back via phase_recovery against the original target.
    """
    t_start = time.perf_counter()
    target = _check_unitary(target_unitary)
    if target.shape != (2**n, 2**n):
        raise ValueError(f"target must be {2**n}x{2**n}")
    target_su = _nearest_su(target)

    circuit = synthesize_circuit(n)
    names = circuit.free_parameters
    dim = len(names)

    ss = np.random.SeedSequence(cfg.seed)
    init_rng, data_rng, holdout_rng = (
        np.random.default_rng(s) for s in ss.spawn(3))
    x0 = init_rng.uniform(-0.1, 0.1, dim)

    needs_states = cfg.loss in ("trace", "fidelity")
    dataset = random_states(2**n, cfg.dataset_size, data_rng) if needs_states else None

    trace: list[float] = []
    if cfg.optimizer == "adam":
        steps_per_epoch = math.ceil(cfg.dataset_size / cfg.batch)
        steps = cfg.epochs * steps_per_epoch
        if needs_states:
            batches = np.array_split(dataset, steps_per_epoch)
            per_step = (
                _make_objective(circuit, names, cfg.loss, target_su,
                                batches[t % steps_per_epoch])
                for t in range(steps))
            best_x, best_f = adam(per_step, x0, steps=steps, lr=cfg.lr,
                                  callback=trace.append)
        else:
            objective = _make_objective(circuit, names, cfg.loss, target_su, None)
            best_x, best_f = adam(objective, x0, steps=steps, lr=cfg.lr,
                                  callback=trace.append)
    else:
        objective = _make_objective(circuit, names, cfg.loss, target_su, dataset)
        max_iter = cfg.max_iter if cfg.max_iter is not None else 200 * dim
        best_x, best_f = nelder_mead(objective, x0, max_iter=max_iter,
                                     tol=cfg.tol, callback=trace.append)
        for _ in range(cfg.restarts):
            if best_f <= cfg.target_loss:
                break
            # rebuilding the simplex at the incumbent undoes collapse; the
            # start point sits in the new simplex, so this never loses ground
            x_cand, f_cand = nelder_mead(objective, best_x, max_iter=max_iter,
                                         tol=cfg.tol, callback=trace.append)
            if f_cand < best_f:
                best_x, best_f = x_cand, f_cand

    params = ParamTable(names, tuple(float(v) for v in best_x))
    u_best = unitary_of(circuit, params)
    recovered = phase_recovery(u_best, target)

    holdout = random_states(2**n, 10, holdout_rng)
    ov = _evolved_overlaps(u_best, target_su, holdout)
    evo = 2.0 * np.sqrt(np.clip(1.0 - ov, 0.0, None))
    final = {
        "frobenius": float(np.linalg.norm(recovered - target)),
        "trace": float(evo.max()),
        "fidelity": float(np.mean(np.clip(1.0 - ov, 0.0, None))),
    }
    return TrainReport(
        final_loss=final,
        best_params=params,
        recovered_unitary=recovered,
        wall_time=time.perf_counter() - t_start,
        loss_trace=trace,
    )
