"""Causal time integration of the assembled space-time system.

The semidiscrete system couples the instantaneous block under the time
derivative, the zero-order rational block realized through auxiliary
states, and the antisymmetric spatial operator:

    M_h dU/dt + D_h U + C x + A_h U = F(t),      dx/dt = P x + B U,

marched from zero history by backward Euler or the trapezoidal rule with
one sparse factorization reused across steps.  Auxiliary dynamics are
diagonal (one simple pole per state), so their elimination adds only a
diagonal correction to the step matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import InputError, SingularSystemError
from .models import MaterialLaw, compute_entropy, recover_theta
from .rational import realize_state_space
from .signals import WeightedSignal, weighted_norm
from .spatial import DiscreteSpatialOperator
from .wellposed import WellPosednessReport, check_symbol_boundary

__all__ = [
    "EvolutionProblem",
    "Trajectory",
    "step_implicit",
    "solve",
    "energy_functional",
    "causality_test",
    "solution_bound_check",
    "CausalityResult",
    "BoundCheckResult",
    "BACKWARD_EULER",
    "TRAPEZOIDAL",
]

BACKWARD_EULER = "backward_euler"
TRAPEZOIDAL = "trapezoidal"

FIELD_BLOCKS = ("v", "sigma", "theta_big", "q")


@dataclass(frozen=True)
class _AuxChain:
    """Diagonal realization states attached to individual unknowns."""

    poles: np.ndarray      # (n_aux,)
    gain_in: np.ndarray    # (n_aux,) input weight on the owner unknown
    gain_out: np.ndarray   # (n_aux,) output weight back onto the owner row
    owner: np.ndarray      # (n_aux,) global dof indices

    @property
    def n_aux(self) -> int:
        return self.poles.size


@dataclass
class EvolutionProblem:
    """Material law, spatial operator, forcing and scheme for one run.

    The forcing signal spans all block unknowns (components ordered v,
    sigma, theta_big, q) on a uniform grid starting at t = 0; its weight is
    the run weight used for all norm accounting.
    """

    law: MaterialLaw
    op: DiscreteSpatialOperator
    forcing: WeightedSignal
    scheme: str = BACKWARD_EULER

    def __post_init__(self):
        if self.scheme not in (BACKWARD_EULER, TRAPEZOIDAL):
            raise InputError(f"unknown scheme '{self.scheme}'")
        if not self.law.is_scalar:
            raise InputError("time integration requires scalar material blocks")
        if self.forcing.n_components != self.op.n_dof:
            raise InputError(
                f"forcing has {self.forcing.n_components} components, "
                f"operator has {self.op.n_dof} unknowns"
            )
        if abs(self.forcing.t_min) > 0:
            raise InputError("the time grid must start at t = 0 (zero history)")
        n = self.op.grid.n_cells
        if self.law.n_cells not in (1, n):
            raise InputError(f"law has {self.law.n_cells} cells, grid has {n}")
        if self.law.n_cells > 1:
            first = self.law.cells[0]
            for cell in self.law.cells[1:]:
                same = (
                    cell.theta_lag == first.theta_lag
                    and np.array_equal(cell.theta_damping.den, first.theta_damping.den)
                    and all(np.array_equal(a, b) for a, b in
                            zip(cell.theta_damping.num, first.theta_damping.num))
                )
                if not same:
                    raise InputError(
                        "per-cell variation of the temperature damping term is not supported"
                    )

    @property
    def dt(self) -> float:
        return self.forcing.dt

    @property
    def rho(self) -> float:
        return self.forcing.rho

    @property
    def n_steps(self) -> int:
        return self.forcing.t.size - 1

    # -- assembled pieces ---------------------------------------------------

    @cached_property
    def node_coeffs(self) -> dict:
        """Cellwise coefficients sampled at node dofs (adjacent-cell mean)."""
        per_cell = self.law.scalar_arrays(self.op.grid.n_cells)
        return {k: 0.5 * (v[:-1] + v[1:]) for k, v in per_cell.items()}

    @cached_property
    def face_coeffs(self) -> dict:
        return self.law.scalar_arrays(self.op.grid.n_cells)

    @cached_property
    def mass_matrix(self) -> sp.csr_matrix:
        """Assembled instantaneous block, symmetric positive semidefinite.

        Built through the triangular congruence so cellwise positivity is
        inherited exactly; the couplings act through the two-point node-to-
        face average, with coupling coefficients sampled at faces.
        """
        op = self.op
        n = op.n_dof
        sl = op.block_slices()
        avg = op.node_to_face.tocoo()

        lmat = sp.lil_matrix((n, n))
        lmat.setdiag(1.0)
        gamma_f = self.face_coeffs["coupling"]
        zeta_f = self.face_coeffs["flux_coupling"]
        for r, c, v in zip(avg.row, avg.col, avg.data):
            lmat[sl[1].start + r, sl[2].start + c] = gamma_f[r] * v
            lmat[sl[3].start + r, sl[2].start + c] = zeta_f[r] * v
        lmat = lmat.tocsr()

        diag = np.concatenate([
            self.node_coeffs["rho0"],
            1.0 / self.face_coeffs["stiffness"],
            self.node_coeffs["heat_capacity"],
            self.face_coeffs["flux_inertia"],
        ])
        core = sp.diags(diag)
        m = (lmat.T @ core @ lmat).tocsr()
        return ((m + m.T) * 0.5).tocsr()

    @cached_property
    def _realizations(self) -> tuple:
        """Feedthrough diagonal and aux chains for the zero-order block."""
        op = self.op
        sl = op.block_slices()
        feed = np.zeros(op.n_dof)
        poles, g_in, g_out, owner = [], [], [], []
        cache = {}

        def realize_cached(r):
            key = (tuple(np.asarray(m).tobytes() for m in r.num), r.den.tobytes())
            if key not in cache:
                cache[key] = realize_state_space(r)
            return cache[key]

        n_cells = op.grid.n_cells
        for f in range(n_cells):
            cell = self.law.cell(f)
            real = realize_cached(cell.flux_resistance)
            dof = sl[3].start + f
            feed[dof] = float(real.d[0, 0])
            for i in range(real.n_states):
                poles.append(real.a[i, i])
                g_in.append(real.b[i, 0])
                g_out.append(real.c[0, i])
                owner.append(dof)

        damping = self.law.cells[0].theta_damping
        if any(np.any(np.asarray(c) != 0) for c in damping.num):
            real = realize_cached(damping)
            for node in range(op.grid.n_nodes):
                dof = sl[2].start + node
                feed[dof] = float(real.d[0, 0])
                for i in range(real.n_states):
                    poles.append(real.a[i, i])
                    g_in.append(real.b[i, 0])
                    g_out.append(real.c[0, i])
                    owner.append(dof)

        chain = _AuxChain(
            np.asarray(poles, dtype=float),
            np.asarray(g_in, dtype=float),
            np.asarray(g_out, dtype=float),
            np.asarray(owner, dtype=int),
        )
        return feed, chain

    @property
    def feedthrough(self) -> np.ndarray:
        return self._realizations[0]

    @property
    def aux_chain(self) -> _AuxChain:
        return self._realizations[1]

    @cached_property
    def _stepper(self) -> "_ImplicitStepper":
        return _ImplicitStepper(self)


class _ImplicitStepper:
    """One factorized step matrix, reused across the march."""

    def __init__(self, problem: EvolutionProblem):
        self.problem = problem
        dt = problem.dt
        chain = problem.aux_chain
        n = problem.op.n_dof
        zero_order = sp.diags(problem.feedthrough) + problem.op.a_h

        if problem.scheme == BACKWARD_EULER:
            self.aux_decay = 1.0 / (1.0 - dt * chain.poles)
            correction = np.zeros(n)
            np.add.at(correction, chain.owner,
                      dt * chain.gain_out * chain.gain_in * self.aux_decay)
            system = problem.mass_matrix / dt + zero_order + sp.diags(correction)
            self.rhs_mass = problem.mass_matrix / dt
            self.explicit_part = None
        else:
            half = 0.5 * dt * chain.poles
            self.aux_decay = 1.0 / (1.0 - half)     # (I - dt/2 P)^-1
            self.aux_grow = 1.0 + half              # (I + dt/2 P)
            correction = np.zeros(n)
            np.add.at(correction, chain.owner,
                      0.25 * dt * chain.gain_out * chain.gain_in * self.aux_decay)
            k_half = 0.5 * zero_order + sp.diags(correction)
            system = problem.mass_matrix / dt + k_half
            self.rhs_mass = problem.mass_matrix / dt - k_half
            self.explicit_part = k_half

        try:
            self.lu = splu(system.tocsc())
        except RuntimeError as exc:
            raise SingularSystemError(
                f"step matrix not invertible at dt={dt:g}: {exc}"
            ) from exc

    def step(self, u_n, x_n, f_next, f_n=None):
        problem = self.problem
        chain = problem.aux_chain
        dt = problem.dt
        if problem.scheme == BACKWARD_EULER:
            rhs = f_next + self.rhs_mass @ u_n
            if chain.n_aux:
                np.subtract.at(rhs, chain.owner,
                               chain.gain_out * self.aux_decay * x_n)
            u_next = self.lu.solve(rhs)
            if chain.n_aux:
                x_next = self.aux_decay * (x_n + dt * chain.gain_in * u_next[chain.owner])
            else:
                x_next = x_n
        else:
            if f_n is None:
                raise InputError("trapezoidal stepping needs the forcing at both ends")
            rhs = 0.5 * (f_next + f_n) + self.rhs_mass @ u_n
            if chain.n_aux:
                np.subtract.at(rhs, chain.owner,
                               chain.gain_out * self.aux_decay * x_n)
            u_next = self.lu.solve(rhs)
            if chain.n_aux:
                x_next = self.aux_decay * (
                    self.aux_grow * x_n
                    + 0.5 * dt * chain.gain_in * (u_next[chain.owner] + u_n[chain.owner])
                )
            else:
                x_next = x_n
        return u_next, x_next


def step_implicit(problem: EvolutionProblem, u_n, x_n, f_next, f_n=None):
    """Advance one implicit step; the factorization is cached on the problem."""
    return problem._stepper.step(
        np.asarray(u_n, dtype=float),
        np.asarray(x_n, dtype=float),
        np.asarray(f_next, dtype=float),
        None if f_n is None else np.asarray(f_n, dtype=float),
    )


@dataclass(frozen=True)
class Trajectory:
    """Solved block states plus auxiliary realization states."""

    problem: EvolutionProblem
    states: np.ndarray  # (n_t, n_dof)
    aux: np.ndarray     # (n_t, n_aux)

    @property
    def t(self) -> np.ndarray:
        return self.problem.forcing.t

    def block(self, name: str) -> WeightedSignal:
        sl = self.problem.op.block_slices()[FIELD_BLOCKS.index(name)]
        return WeightedSignal(self.t, self.states[:, sl], self.problem.rho)

    def displacement(self) -> WeightedSignal:
        """Scheme-consistent causal antiderivative of the velocity block."""
        v = self.block("v").samples
        dt = self.problem.dt
        if self.problem.scheme == BACKWARD_EULER:
            u = dt * np.cumsum(v, axis=0) - dt * v[0]
        else:
            u = np.zeros_like(v)
            u[1:] = 0.5 * dt * np.cumsum(v[1:] + v[:-1], axis=0)
        return WeightedSignal(self.t, u, self.problem.rho)

    def strain(self) -> WeightedSignal:
        eps = self.displacement().samples @ self.problem.op.d_grad.T.toarray()
        return WeightedSignal(self.t, eps, self.problem.rho)

    def theta(self) -> WeightedSignal:
        return recover_theta(self.block("theta_big"), self.problem.law.theta_lag)

    def entropy(self) -> WeightedSignal:
        """Entropy at the interior nodes (uniform laws only)."""
        law = self.problem.law
        if not law.is_uniform():
            raise InputError("entropy export supports uniform laws only")
        avg = self.problem.op.node_to_face.toarray()  # right-multiplying: face -> node mean
        eps_nodes = self.strain().samples @ avg
        q_nodes = self.block("q").samples @ avg
        uniform = MaterialLaw(law.family, (law.cells[0],))
        rho = self.problem.rho
        return compute_entropy(
            uniform,
            WeightedSignal(self.t, eps_nodes, rho),
            self.block("theta_big"),
            WeightedSignal(self.t, q_nodes, rho),
        )

    def space_time_norm(self, name: str = None) -> float:
        """Weighted space-time norm (h-weighted in space) of a block or of all."""
        h = self.problem.op.grid.h
        if name is None:
            sig = WeightedSignal(self.t, self.states, self.problem.rho)
        else:
            sig = self.block(name)
        return float(np.sqrt(h) * weighted_norm(sig))

    def export_csv(self, directory) -> list:
        """One CSV per field (primary and derived) plus the energy series."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        fields = {name: self.block(name) for name in FIELD_BLOCKS}
        fields["u"] = self.displacement()
        fields["epsilon"] = self.strain()
        fields["theta"] = self.theta()
        try:
            fields["eta"] = self.entropy()
        except InputError:
            pass
        for name, signal in fields.items():
            path = directory / f"{name}.csv"
            _write_named_csv(signal, path)
            written.append(path)
        energy = energy_functional(self)
        path = directory / "energy.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,energy\n")
            for ti, ei in zip(self.t, energy):
                fh.write(f"{format(ti, '.17g')},{format(ei, '.17g')}\n")
        written.append(path)
        return written


def _write_named_csv(signal: WeightedSignal, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = "t," + ",".join(f"x_{i}" for i in range(signal.n_components))
        fh.write(header + "\n")
        for k in range(signal.t.size):
            row = [signal.t[k], *signal.samples[k]]
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def solve(problem: EvolutionProblem) -> Trajectory:
    """March the implicit scheme from zero initial data over the grid."""
    n_t = problem.forcing.t.size
    n = problem.op.n_dof
    chain = problem.aux_chain
    states = np.zeros((n_t, n))
    aux = np.zeros((n_t, chain.n_aux))
    stepper = problem._stepper
    f = problem.forcing.samples
    u = states[0]
    x = aux[0]
    for k in range(n_t - 1):
        u, x = stepper.step(u, x, f[k + 1], f[k])
        states[k + 1] = u
        aux[k + 1] = x
    return Trajectory(problem, states, aux)


def energy_functional(trajectory: Trajectory, law: MaterialLaw = None) -> np.ndarray:
    """Per-step quadratic form of the instantaneous block, h-weighted.

    For laws with constant Hermitian zero-order block and vanished forcing,
    backward Euler makes this sequence nonincreasing and the trapezoidal
    rule conserves it exactly (skew spatial part drops out).
    """
    problem = trajectory.problem
    if law is not None and law is not problem.law:
        raise InputError("law does not match the trajectory's problem")
    m = problem.mass_matrix
    h = problem.op.grid.h
    u = trajectory.states
    return h * np.einsum("ki,ki->k", u, (m @ u.T).T)


@dataclass(frozen=True)
class CausalityResult:
    leakage: float
    skipped: bool = False
    reason: str = ""


def causality_test(problem: EvolutionProblem, t0: float) -> CausalityResult:
    """Pre-support leakage ratio of the marched solution.

    Requires the forcing to vanish for t < t0 with t0 strictly inside the
    window; when the forcing support touches the window start the check is
    skipped with a diagnostic instead of reporting a meaningless ratio.
    """
    t = problem.forcing.t
    f = problem.forcing.samples
    active = np.flatnonzero(np.any(f != 0.0, axis=1))
    if active.size == 0:
        return CausalityResult(0.0)
    t_first = float(t[active[0]])
    if t_first <= t[0]:
        return CausalityResult(float("nan"), skipped=True,
                               reason="forcing support touches the window start")
    if t_first < t0:
        return CausalityResult(float("nan"), skipped=True,
                               reason=f"forcing is nonzero before t0={t0:g}")
    trajectory = solve(problem)
    magnitude = np.max(np.abs(trajectory.states), axis=1)
    peak = float(np.max(magnitude))
    if peak == 0.0:
        return CausalityResult(0.0)
    before = magnitude[t < t0 - 2.0 * problem.dt]
    if before.size == 0:
        return CausalityResult(float("nan"), skipped=True,
                               reason="no grid points before t0 - 2 dt")
    return CausalityResult(float(np.max(before)) / peak)


@dataclass(frozen=True)
class BoundCheckResult:
    lhs: float
    rhs: float
    c_used: float
    tail_ratio: float
    slack: float = 0.05

    @property
    def window_ok(self) -> bool:
        return self.tail_ratio <= 1e-6

    @property
    def ok(self) -> bool:
        return self.window_ok and self.lhs <= self.rhs * (1.0 + self.slack)


def solution_bound_check(
    problem: EvolutionProblem,
    report: WellPosednessReport,
    trajectory: Trajectory = None,
) -> BoundCheckResult:
    """A-priori bound check: solution norm against forcing norm over c.

    The constant is the sampled boundary minimum of the Hermitian part of
    the weighted symbol at the run weight, the quantity the solution theory
    inverts.  The weighted tail of the solution at the window end is
    reported so short windows are flagged rather than silently accepted.
    """
    if report.verdict != "satisfied":
        raise InputError("bound check requires a satisfied well-posedness verdict")
    if np.isfinite(report.rho_min) and problem.rho < report.rho_min:
        raise InputError(
            f"run weight rho={problem.rho:g} below certified rho_min={report.rho_min:g}"
        )
    if trajectory is None:
        trajectory = solve(problem)
    c_used, _ = check_symbol_boundary(problem.law, problem.rho)
    if c_used <= 0:
        raise InputError("sampled positivity constant is not positive")

    h = problem.op.grid.h
    lhs = trajectory.space_time_norm()
    rhs = float(np.sqrt(h) * weighted_norm(problem.forcing)) / c_used

    weighted = np.exp(-problem.rho * trajectory.t)[:, None] * trajectory.states
    envelope = np.max(np.abs(weighted), axis=1)
    peak = float(np.max(envelope))
    tail = float(envelope[-1]) / peak if peak > 0 else 0.0
    return BoundCheckResult(lhs, rhs, float(c_used), tail)
