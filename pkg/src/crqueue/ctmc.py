"""Stationary solution of the full two-class chain on a truncated state space.

State ``(i, j)``: ``i`` class-1 and ``j`` class-2 packets in the system.
The generator is built from the transitions themselves; hand-written
balance equations are only evaluated afterwards as residual checks.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .params import SystemParams

log = logging.getLogger(__name__)

MAX_STATES = 10**6
DIRECT_SOLVE_LIMIT = MAX_STATES


class StateSpaceTooLarge(ValueError):
    pass


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class CtmcModel:
    params: SystemParams
    i_max: int
    j_max: int
    generator: sp.csr_matrix = field(repr=False)

    @property
    def n_states(self) -> int:
        return (self.i_max + 1) * (self.j_max + 1)

    def index(self, i: int, j: int) -> int:
        return i * (self.j_max + 1) + j

    def state(self, k: int) -> tuple[int, int]:
        return divmod(k, self.j_max + 1)

    def rate(self, src: tuple[int, int], dst: tuple[int, int]) -> float:
        return float(self.generator[self.index(*src), self.index(*dst)])


def build_ctmc(p: SystemParams, j_max: int, max_states: int = MAX_STATES) -> CtmcModel:
    """Assemble the sparse generator with reflecting truncation.

    Class-1 arrivals are blocked at ``n1_cap`` (the queue capacity) and
    class-2 arrivals at ``j_max`` (the numerical truncation).
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    i_max = p.n1_cap
    ni, nj = i_max + 1, j_max + 1
    if ni * nj > max_states:
        raise StateSpaceTooLarge(f"{ni * nj} states exceed the cap of {max_states}")

    I, J = np.meshgrid(np.arange(ni), np.arange(nj), indexing="ij")
    I, J = I.ravel(), J.ravel()
    k = I * nj + J
    rows, cols, vals = [], [], []

    def add(mask, dst, rate):
        rate = np.broadcast_to(rate, k.shape)[mask]
        keep = rate > 0
        rows.append(k[mask][keep])
        cols.append(dst[mask][keep])
        vals.append(rate[keep])

    add(I < i_max, k + nj, p.lambda1)
    add(J < j_max, k + 1, p.lambda2)
    add(I >= 1, k - nj, p.mu1 + (I - 1) * p.gamma)
    add((I == 0) & (J >= 1), k - 1, p.mu2)

    rows, cols, vals = (np.concatenate(x) for x in (rows, cols, vals))
    off = sp.csr_matrix((vals, (rows, cols)), shape=(ni * nj, ni * nj))
    out_rate = np.asarray(off.sum(axis=1)).ravel()
    gen = (off - sp.diags(out_rate)).tocsr()
    return CtmcModel(p, i_max, j_max, gen)


@dataclass(frozen=True)
class StationaryDist:
    pij: np.ndarray
    boundary_mass: float
    residual: float
    clamped_mass: float = 0.0

    @property
    def i_max(self) -> int:
        return self.pij.shape[0] - 1

    @property
    def j_max(self) -> int:
        return self.pij.shape[1] - 1


def _power_iteration(gen: sp.csr_matrix, tol: float, max_iter: int) -> np.ndarray:
    rate = float(np.max(-gen.diagonal()))
    P = (sp.identity(gen.shape[0], format="csr") + gen / rate).T.tocsr()
    pi = np.full(gen.shape[0], 1.0 / gen.shape[0])
    for _ in range(max_iter):
        nxt = P @ pi
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    raise SolverError(f"power iteration did not converge in {max_iter} steps")


def solve_stationary(m: CtmcModel, method: str = "auto", tol: float = 1e-15,
                     max_iter: int = 10**6) -> StationaryDist:
    """Solve ``pi G = 0`` with ``sum(pi) = 1``.

    ``method`` is ``"direct"`` (sparse LU on the balance equations with the
    mass of state (0,0) pinned, then normalized), ``"power"`` (uniformized
    power iteration) or ``"auto"``, which picks direct up to
    ``DIRECT_SOLVE_LIMIT`` states.
    """
    n = m.n_states
    if method == "auto":
        method = "direct" if n <= DIRECT_SOLVE_LIMIT else "power"
    if method == "direct":
        # (0,0) is recurrent for every parameter set, so its balance equation is
        # redundant: pin pi[0] = 1, solve the rest, normalize afterwards
        At = m.generator.T.tocsc()
        A = At[1:, 1:]
        b = -At[1:, 0].toarray().ravel()
        with np.errstate(all="raise"):
            try:
                rest = spla.spsolve(A, b) if n > 1 else np.zeros(0)
            except (FloatingPointError, RuntimeError) as exc:
                raise SolverError(str(exc)) from exc
        pi = np.concatenate(([1.0], np.atleast_1d(rest)))
        if not np.all(np.isfinite(pi)):
            raise SolverError("singular generator")
    elif method == "power":
        pi = _power_iteration(m.generator, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")

    negative = pi < 0
    clamped = float(-pi[negative].sum())
    if np.any(pi < -1e-14):
        log.warning("clamping negative stationary mass %.3e", clamped)
    pi = np.where(negative, 0.0, pi)
    pi /= pi.sum()
    residual = float(np.max(np.abs(m.generator.T @ pi)))
    pij = pi.reshape(m.i_max + 1, m.j_max + 1)
    return StationaryDist(pij, float(pij[:, -1].sum()), residual, clamped)


def solve_auto(p: SystemParams, j_start: int = 64, boundary_tol: float = 1e-9,
               max_states: int = MAX_STATES) -> tuple[CtmcModel, StationaryDist]:
    """Double ``j_max`` from ``j_start`` until the truncation frontier holds < ``boundary_tol``.

    Returns the last model solved even if the state cap stops the doubling;
    callers check ``boundary_mass``.  Raises :class:`SolverError` when class 2
    is unstable, i.e. ``lambda2 >= mu2 * P(no class-1 packet)``.
    """
    j_max = j_start
    model = build_ctmc(p, j_max, max_states)
    dist = solve_stationary(model)
    # class 2 is served at mu2 exactly when i == 0; that marginal does not depend on j_max
    idle1 = float(marginal_class1(dist)[0])
    if p.lambda2 >= p.mu2 * idle1:
        raise SolverError(f"class 2 is unstable: lambda2={p.lambda2:g} >= "
                          f"mu2*P(i=0)={p.mu2 * idle1:.6g}")
    while dist.boundary_mass >= boundary_tol:
        if (p.n1_cap + 1) * (2 * j_max + 1) > max_states:
            log.warning("state cap reached at j_max=%d, boundary mass %.3e",
                        j_max, dist.boundary_mass)
            break
        j_max *= 2
        model = build_ctmc(p, j_max, max_states)
        dist = solve_stationary(model)
    return model, dist


def marginal_class1(d: StationaryDist) -> np.ndarray:
    return d.pij.sum(axis=1)


def marginal_class2(d: StationaryDist) -> np.ndarray:
    return d.pij.sum(axis=0)


@dataclass(frozen=True)
class CtmcMetrics:
    """Moments and Little's-law delays read off the stationary law.

    Delays divide by the admitted rate (arrivals not blocked by the class-1
    capacity or the class-2 truncation).  ``mean_wait1_system`` divides the
    class-1 system size by the raw arrival rate, matching the analytic
    convention.
    """

    mean_n1: float
    mean_n2: float
    empty_prob1: float
    empty_prob_both: float
    blocking_prob1: float
    overflow_prob: float
    mean_wait1_system: float
    sojourn1: float
    queue_wait1: float
    abandon_prob1: float
    sojourn2: float
    queue_wait2: float
    boundary_mass: float
    trusted: bool


def ctmc_metrics(d: StationaryDist, p: SystemParams, boundary_tol: float = 1e-9) -> CtmcMetrics:
    m1 = marginal_class1(d)
    m2 = marginal_class2(d)
    i = np.arange(m1.size)
    j = np.arange(m2.size)
    mean_n1 = float(i @ m1)
    mean_n2 = float(j @ m2)
    waiting1 = float(np.maximum(i - 1, 0) @ m1)
    blocking = float(m1[-1])
    # one-step extension of the birth-death recursion past capacity
    overflow = blocking * p.lambda1 / (p.mu1 + p.n1_cap * p.gamma)
    # class 2 is in service only when no class-1 packet is present
    in_service2 = float(d.pij[0, 1:].sum())
    nan = float("nan")
    if p.lambda1 > 0:
        adm1 = p.lambda1 * (1.0 - blocking)
        wait1_system, soj1, qw1 = mean_n1 / p.lambda1, mean_n1 / adm1, waiting1 / adm1
        abandon = p.gamma * waiting1 / p.lambda1
    else:
        wait1_system = soj1 = qw1 = abandon = 0.0
    if p.lambda2 > 0:
        adm2 = p.lambda2 * (1.0 - float(m2[-1]))
        soj2, qw2 = mean_n2 / adm2, (mean_n2 - in_service2) / adm2
    else:
        soj2 = qw2 = nan
    return CtmcMetrics(
        mean_n1=mean_n1,
        mean_n2=mean_n2,
        empty_prob1=float(m1[0]),
        empty_prob_both=float(d.pij[0, 0]),
        blocking_prob1=blocking,
        overflow_prob=overflow,
        mean_wait1_system=wait1_system,
        sojourn1=soj1,
        queue_wait1=qw1,
        abandon_prob1=abandon,
        sojourn2=soj2,
        queue_wait2=qw2,
        boundary_mass=d.boundary_mass,
        trusted=d.boundary_mass <= boundary_tol,
    )


def _family(I, J):
    return np.where(I == 0, np.where(J == 0, "i=0,j=0", "i=0,j>0"),
                    np.where(J == 0, "i>0,j=0", "i>0,j>0"))


def balance_residual(d: StationaryDist, m: CtmcModel, by_family: bool = False):
    """Max absolute global-balance residual of ``d`` under the generator of ``m``.

    With ``by_family=True`` returns a dict keyed by the four state families
    ``i=0,j=0``, ``i=0,j>0``, ``i>0,j=0``, ``i>0,j>0``.
    """
    r = np.abs(m.generator.T @ d.pij.ravel())
    if not by_family:
        return float(r.max())
    I, J = np.divmod(np.arange(r.size), m.j_max + 1)
    fam = _family(I, J)
    return {name: float(r[fam == name].max()) if np.any(fam == name) else 0.0
            for name in ("i=0,j=0", "i=0,j>0", "i>0,j=0", "i>0,j>0")}


def _maxabs(x) -> float:
    x = np.abs(np.asarray(x, dtype=float))
    return float(x.max()) if x.size else 0.0


def candidate_balance_residuals(d: StationaryDist, p: SystemParams) -> dict[str, float]:
    """Residuals of hand-written balance equations for each state family.

    ``origin`` is state (0,0), ``class2_edge`` the states (0,j), ``class1_edge``
    the states (i,0) and ``interior`` the states (i,j) with i, j > 0, all away
    from the truncation edges.  ``class1_edge`` weights the inflow from
    ``(i+1, 0)`` by ``mu1 + (i-1) gamma``; ``interior`` applies that rate to
    inflow from ``(i, j+1)``.  The ``*_alt`` forms take the class-1 departure
    inflow from ``(i+1, j)`` at the source-state rate ``mu1 + i gamma``;
    these agree with the generator.
    """
    P = d.pij
    l1, l2, mu1, mu2, g = p.lambda1, p.lambda2, p.mu1, p.mu2, p.gamma
    imax, jmax = P.shape[0] - 1, P.shape[1] - 1
    out = {}
    out["origin"] = _maxabs((l1 + l2) * P[0, 0] - mu1 * P[1, 0] - mu2 * P[0, 1])
    j = np.arange(1, jmax)
    out["class2_edge"] = _maxabs(
        P[0, j] * (l1 + l2 + mu2) - l2 * P[0, j - 1] - mu2 * P[0, j + 1] - mu1 * P[1, j])
    i = np.arange(1, imax)
    dep = mu1 + (i - 1) * g
    out["class1_edge"] = _maxabs(
        P[i, 0] * (l2 + l1 + dep) - l1 * P[i - 1, 0] - dep * P[i + 1, 0])
    out["class1_edge_alt"] = _maxabs(
        P[i, 0] * (l2 + l1 + dep) - l1 * P[i - 1, 0] - (mu1 + i * g) * P[i + 1, 0])
    ii, jj = np.meshgrid(i, j, indexing="ij")
    dep2 = mu1 + (ii - 1) * g
    lhs = P[ii, jj] * (dep2 + l1 + l2)
    out["interior"] = _maxabs(
        lhs - l2 * P[ii, jj - 1] - l1 * P[ii - 1, jj] - dep2 * P[ii, jj + 1])
    out["interior_alt"] = _maxabs(
        lhs - l2 * P[ii, jj - 1] - l1 * P[ii - 1, jj] - (mu1 + ii * g) * P[ii + 1, jj])
    return out


def dump_csv(d: StationaryDist, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "prob"])
        for (i, j), v in np.ndenumerate(d.pij):
            w.writerow([i, j, f"{v:.12g}"])
