"""Numerical certification of the solution-theory hypotheses.

Three layers of checking, from cheap to thorough:

* :func:`check_condition_rho` evaluates the Hermitian matrix
  ``rho * M(0) + Re M'(0)`` cellwise and reports its smallest eigenvalue,
  the rational-law simplification of the positivity condition.
* :func:`check_symbol_boundary` samples ``Re z^{-1} M(z)`` over the
  admissibility ball boundary region (a sampling certificate, not a proof).
* :func:`certify_wellposedness` runs the structural range/kernel conditions
  that guarantee a causal bounded inverse and combines everything into a
  :class:`WellPosednessReport`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _json
from .errors import InputError, UnreachableTargetError
from .models import MaterialLaw, SPECTRAL_CUTOFF, _block_slices, classify
from .rational import RationalMatrixFunction, eval_rational

__all__ = [
    "Witness",
    "WellPosednessReport",
    "check_condition_rho",
    "check_symbol_boundary",
    "certify_wellposedness",
    "find_min_rho",
]

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

#: search range for the weight rho
RHO_RANGE = (1e-3, 1e6)
#: log-spaced rho search grid resolution (points per decade)
RHO_GRID_PER_DECADE = 20


@dataclass(frozen=True)
class Witness:
    """A most-negative direction found during certification."""

    cell: int
    eigenvalue: float
    eigenvector: np.ndarray

    def as_dict(self) -> dict:
        return {
            "cell": self.cell,
            "eigenvalue": self.eigenvalue,
            "eigenvector": [float(x) for x in np.real(self.eigenvector)],
        }


@dataclass(frozen=True)
class WellPosednessReport:
    verdict: str
    c_estimate: float
    rho_min: float
    classification: str
    witnesses: tuple
    checks_run: tuple

    def to_json(self) -> str:
        return _json.dumps({
            "verdict": self.verdict,
            "c_estimate": self.c_estimate,
            "rho_min": self.rho_min,
            "classification": self.classification,
            "witnesses": [w.as_dict() for w in self.witnesses],
            "checks_run": list(self.checks_run),
        })


def _condition_matrix(cell, rho: float) -> np.ndarray:
    h = rho * cell.mass() + _herm(cell.dissipation().at_zero())
    return h


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def check_condition_rho(law: MaterialLaw, rho: float) -> tuple:
    """Smallest eigenvalue of rho * M(0) + Re M'(0) over all cells.

    Returns ``(min_eigenvalue, witness)`` where the witness records the cell
    and eigenvector attaining the minimum.
    """
    if rho <= 0:
        raise InputError("rho must be positive")
    best = None
    for index, cell in enumerate(law.cells):
        h = _condition_matrix(cell, rho)
        eigvals, eigvecs = np.linalg.eigh(h)
        if best is None or eigvals[0] < best.eigenvalue:
            best = Witness(index, float(eigvals[0]), eigvecs[:, 0])
    return best.eigenvalue, best


def check_symbol_boundary(
    symbol,
    rho0: float,
    n_samples: int = 257,
    n_shells: int = 8,
) -> tuple:
    """Sampled minimum of the Hermitian part of z^{-1} M(z) near the ball.

    ``symbol`` may be a :class:`MaterialLaw` (checked cellwise), a single
    rational function, or a sequence of them.  Samples z = 1/(i t + rho)
    for rho on shells ``rho0 * (1 + 2^{-j})`` and t on a symmetric
    log-spaced grid (plus t = 0).  Returns ``(min_eigenvalue, worst_z)``.
    This is a sampling certificate, not a proof over the full ball.
    """
    if rho0 <= 0:
        raise InputError("rho0 must be positive")
    if isinstance(symbol, MaterialLaw):
        symbols = [cell.symbol() for cell in symbol.cells]
    elif isinstance(symbol, RationalMatrixFunction):
        symbols = [symbol]
    else:
        symbols = list(symbol)

    half = max((n_samples - 1) // 2, 1)
    t_pos = rho0 * np.logspace(-3, 6, half)
    t_grid = np.concatenate([[0.0], t_pos, -t_pos])
    shells = rho0 * (1.0 + 2.0 ** (-np.arange(n_shells, dtype=float)))

    min_eig = np.inf
    worst_z = None
    for sym in symbols:
        for rho in shells:
            z_inv = 1j * t_grid + rho
            z = 1.0 / z_inv
            vals = eval_rational(sym, z)
            mats = z_inv[:, None, None] * vals
            herm = 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))
            eigs = np.linalg.eigvalsh(herm)
            k = int(np.argmin(eigs[:, 0]))
            if eigs[k, 0] < min_eig:
                min_eig = float(eigs[k, 0])
                worst_z = complex(z[k])
    return min_eig, worst_z


def _rho_grid() -> np.ndarray:
    lo, hi = RHO_RANGE
    decades = np.log10(hi) - np.log10(lo)
    return np.geomspace(lo, hi, int(decades * RHO_GRID_PER_DECADE) + 1)


def certify_wellposedness(law: MaterialLaw) -> WellPosednessReport:
    """Certify the structural positivity hypotheses behind causal solvability.

    Per cell: density, stiffness and heat capacity must be strictly positive;
    the flux inertia must be positive definite on its range; and the Hermitian
    part of the flux resistance at zero must be strictly positive definite on
    the inertia's kernel.  A singular (but non-negative) heat capacity makes
    the verdict inconclusive rather than violated, since a compensating
    zero-order term lies outside the certified conditions.
    """
    witnesses = []
    inconclusive = False
    checks = [
        "rho0_positive",
        "stiffness_positive",
        "heat_capacity_positive",
        "flux_inertia_pd_on_range",
        "flux_resistance_pd_on_kernel",
        "condition_rho_search",
    ]

    for index, cell in enumerate(law.cells):
        dims = cell.block_dims
        sl = _block_slices(dims)
        n_total = sum(dims)

        def embed(vec, block):
            full = np.zeros(n_total, dtype=complex)
            full[sl[block]] = vec
            return full

        for attr, block in (("rho0", 0), ("stiffness", 1)):
            mat = _herm(np.asarray(getattr(cell, attr), dtype=complex))
            eigvals, eigvecs = np.linalg.eigh(mat)
            scale = max(float(np.max(np.abs(eigvals))), 1e-300)
            if eigvals[0] <= SPECTRAL_CUTOFF * scale:
                witnesses.append(Witness(index, float(eigvals[0]), embed(eigvecs[:, 0], block)))

        nu = _herm(np.asarray(cell.heat_capacity, dtype=complex))
        eigvals, eigvecs = np.linalg.eigh(nu)
        scale = max(float(np.max(np.abs(eigvals))), 1e-300)
        if eigvals[0] < -SPECTRAL_CUTOFF * scale:
            witnesses.append(Witness(index, float(eigvals[0]), embed(eigvecs[:, 0], 2)))
        elif eigvals[0] <= SPECTRAL_CUTOFF * scale:
            inconclusive = True

        a0 = _herm(np.asarray(cell.flux_inertia, dtype=complex))
        eigvals, eigvecs = np.linalg.eigh(a0)
        scale = float(np.max(np.abs(eigvals)))
        tol = SPECTRAL_CUTOFF * scale
        on_range = np.abs(eigvals) > tol
        negatives = on_range & (eigvals < 0)
        for i in np.flatnonzero(negatives):
            witnesses.append(Witness(index, float(eigvals[i]), embed(eigvecs[:, i], 3)))

        kernel = eigvecs[:, ~on_range]
        if kernel.shape[1] > 0:
            re_a2 = _herm(cell.flux_resistance.at_zero())
            a2_scale = float(np.max(np.abs(np.linalg.eigvalsh(re_a2)))) if re_a2.size else 0.0
            projected = kernel.conj().T @ re_a2 @ kernel
            k_eigvals, k_eigvecs = np.linalg.eigh(_herm(projected))
            if a2_scale == 0.0 or k_eigvals[0] <= SPECTRAL_CUTOFF * a2_scale:
                vec = kernel @ k_eigvecs[:, 0]
                witnesses.append(Witness(index, float(k_eigvals[0]), embed(vec, 3)))

    classification = classify(law)

    if witnesses:
        witnesses.sort(key=lambda w: w.eigenvalue)
        return WellPosednessReport(
            VIOLATED, 0.0, float("inf"), classification, tuple(witnesses), tuple(checks)
        )
    if inconclusive:
        return WellPosednessReport(
            INCONCLUSIVE, 0.0, float("inf"), classification, (), tuple(checks)
        )

    rho_min = float("inf")
    c_estimate = 0.0
    for rho in _rho_grid():
        min_eig, _ = check_condition_rho(law, rho)
        if min_eig > 0.0:
            rho_min = float(rho)
            c_estimate = float(min_eig)
            break
    if not np.isfinite(rho_min):
        # structural conditions hold but the sampled search failed; report
        # honestly rather than extrapolating
        return WellPosednessReport(
            INCONCLUSIVE, 0.0, float("inf"), classification, (), tuple(checks)
        )
    return WellPosednessReport(
        SATISFIED, c_estimate, rho_min, classification, (), tuple(checks)
    )


def find_min_rho(law: MaterialLaw, c_target: float, tol: float = 1e-6) -> float:
    """Smallest rho with min eig of rho*M(0) + Re M'(0) >= c_target.

    Bisection over the standard search range; valid because the minimum
    eigenvalue is nondecreasing in rho whenever M(0) is positive
    semidefinite (the satisfied-verdict situation).
    """
    if c_target <= 0:
        raise InputError("c_target must be positive")
    lo, hi = RHO_RANGE

    def gap(rho):
        return check_condition_rho(law, rho)[0] - c_target

    if gap(hi) < 0:
        raise UnreachableTargetError(
            f"positivity constant {c_target} not attainable for rho <= {hi:g}"
        )
    if gap(lo) >= 0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi
