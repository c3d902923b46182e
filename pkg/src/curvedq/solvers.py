"""Spectral and time-domain solution of assembled operators."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceFailure, LinearSolveFailure
from .operators import (
    GeometrySample,
    HamiltonianOperator,
    PhysicalParams,
    WaveFunction,
    hermiticity_defect,
    weighted_inner_product,
)

DENSE_THRESHOLD = 1500
SOLVER_HERMITICITY_TOL = 1e-10


@dataclass
class SpectrumResult:
    """Ascending eigenpairs with W-norm residuals."""

    eigenvalues: np.ndarray
    eigenvectors: List[WaveFunction]
    residuals: np.ndarray
    solver_tag: str


@dataclass
class EvolutionTrace:
    """Time series of norm and observables plus wavefunction snapshots."""

    times: np.ndarray
    norms: np.ndarray
    energies: np.ndarray
    observables: Dict[str, np.ndarray] = field(default_factory=dict)
    snapshots: List[Tuple[int, WaveFunction]] = field(default_factory=list)


def _symmetrized(op: HamiltonianOperator):
    """Similarity transform to a plain Hermitian problem via W^{1/2}."""
    s = np.sqrt(op.weights)
    S = sp.diags(s) @ op.matrix @ sp.diags(1.0 / s)
    return 0.5 * (S + S.conj().T), s


def eigensolve_lowest(
    op: HamiltonianOperator,
    k: int,
    seed: int = 0,
    tol: float = 0.0,
) -> SpectrumResult:
    """k lowest eigenpairs of the weighted Hermitian problem.

    Dense solve below DENSE_THRESHOLD nodes, shift-inverted Lanczos above
    (the shift is a Gershgorin lower bound, so closest-to-shift = lowest).
    """
    n = op.matrix.shape[0]
    if not k < n:
        raise ValueError(f"need k < N, got k={k}, N={n}")
    defect = hermiticity_defect(op)
    if defect > SOLVER_HERMITICITY_TOL:
        raise ConvergenceFailure(f"operator not Hermitian enough: defect {defect:.2e}")
    S, s = _symmetrized(op)
    if n <= DENSE_THRESHOLD:
        vals, vecs = sla.eigh(S.toarray())
        vals, vecs = vals[:k], vecs[:, :k]
        tag = "dense-eigh"
    else:
        diag = S.diagonal().real
        row_abs = np.abs(S).sum(axis=1).A1 - np.abs(diag)
        lb = float(np.min(diag - row_abs)) - 1.0
        rng = np.random.RandomState(seed)
        v0 = rng.standard_normal(n)
        try:
            vals, vecs = spla.eigsh(S, k=k, sigma=lb, which="LM", v0=v0, tol=tol)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceFailure(
                f"ARPACK failed: {len(exc.eigenvalues)}/{k} pairs converged"
            ) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        tag = "lanczos-shift-invert"
    eigenvectors = []
    residuals = np.empty(k)
    w = op.weights
    for i in range(k):
        chi = vecs[:, i] / s
        hchi = op.matrix @ chi
        r = hchi - vals[i] * chi
        residuals[i] = np.sqrt(np.sum(w * np.abs(r) ** 2).real)
        eigenvectors.append(
            WaveFunction(values=chi.reshape(op.grid.shape), grid=op.grid)
        )
    return SpectrumResult(
        eigenvalues=np.asarray(vals, dtype=float),
        eigenvectors=eigenvectors,
        residuals=residuals,
        solver_tag=tag,
    )


Observable = Union[str, HamiltonianOperator, Tuple[str, int], callable]


def expectation_value(
    psi: WaveFunction,
    op: Observable,
    hop: Optional[HamiltonianOperator] = None,
) -> complex:
    """<psi|O|psi> under the sqrt(g)-weighted inner product.

    op: "H" (uses hop), a HamiltonianOperator, a position function
    f(q1, q2) evaluated on the mesh, or ("deriv", axis) for the canonical
    derivative -i hbar d/dq_axis.
    """
    if op == "H":
        op = hop
    if isinstance(op, HamiltonianOperator):
        phi = WaveFunction(
            values=(op.matrix @ psi.values.ravel()).reshape(psi.grid.shape),
            grid=psi.grid,
        )
        return weighted_inner_product(psi, phi, op.measure)
    if hop is None:
        raise ValueError("need the Hamiltonian for the integration measure")
    if isinstance(op, tuple) and op[0] == "deriv":
        axis = op[1]
        hbar = hop.params.hbar
        dpsi = psi.grid.gradient(psi.values, axis=axis)
        phi = WaveFunction(values=-1j * hbar * dpsi, grid=psi.grid)
        return weighted_inner_product(psi, phi, hop.measure)
    if callable(op):
        mesh = psi.grid.meshgrid()
        f = op(*mesh)
        phi = WaveFunction(values=f * psi.values, grid=psi.grid)
        return weighted_inner_product(psi, phi, hop.measure)
    raise ValueError(f"unknown observable spec {op!r}")


def probability_current(
    psi: WaveFunction,
    geo: GeometrySample,
    a_cov: Sequence[np.ndarray],
    params: PhysicalParams,
) -> Tuple[np.ndarray, np.ndarray]:
    """Contravariant current components j^a on the grid.

    j^a = (1/m) Im[chi* g^{ab} (hbar d_b chi)] - (Q/m) g^{ab} A_b |chi|^2.
    """
    hbar, mass, charge = params.hbar, params.mass, params.charge
    d = [psi.grid.gradient(psi.values, axis=a) for a in (0, 1)]
    out = []
    for a in (0, 1):
        para = np.zeros(psi.grid.shape)
        dia = np.zeros(psi.grid.shape)
        for b in (0, 1):
            gab = geo.g_inv[..., a, b]
            para = para + np.imag(np.conj(psi.values) * gab * hbar * d[b])
            dia = dia + gab * a_cov[b] * np.abs(psi.values) ** 2
        out.append(para / mass - charge / mass * dia)
    return out[0], out[1]


def propagate_cn(
    op: HamiltonianOperator,
    psi0: WaveFunction,
    dt: float,
    steps: int,
    observables: Optional[Dict[str, Observable]] = None,
    snapshot_stride: int = 0,
) -> EvolutionTrace:
    """Crank-Nicolson evolution (I + i dt H/2hbar) psi' = (I - i dt H/2hbar) psi."""
    hbar = op.params.hbar
    n = op.matrix.shape[0]
    diag = op.matrix.diagonal()
    radius_est = float(np.max(np.abs(diag) + (np.abs(op.matrix).sum(axis=1).A1 - np.abs(diag))))
    if dt * radius_est / hbar > 2.0:
        warnings.warn(
            f"dt * spectral-radius estimate = {dt * radius_est / hbar:.2f} > 2; "
            "Crank-Nicolson stays stable but phases of high modes are inaccurate",
            stacklevel=2,
        )
    ident = sp.identity(n, dtype=complex, format="csc")
    a_mat = (ident + 0.5j * dt / hbar * op.matrix).tocsc()
    b_mat = (ident - 0.5j * dt / hbar * op.matrix).tocsr()
    try:
        lu = spla.splu(a_mat)
    except RuntimeError as exc:
        raise LinearSolveFailure(f"factorization failed: {exc}") from exc

    observables = observables or {}
    times = np.arange(steps + 1) * dt
    norms = np.empty(steps + 1)
    energies = np.empty(steps + 1)
    obs_series = {name: np.empty(steps + 1, dtype=complex) for name in observables}
    snapshots: List[Tuple[int, WaveFunction]] = []

    psi = psi0.copy()

    def record(step):
        norms[step] = np.sqrt(
            weighted_inner_product(psi, psi, op.measure).real
        )
        energies[step] = expectation_value(psi, op).real
        for name, spec in observables.items():
            obs_series[name][step] = expectation_value(psi, spec, hop=op)
        if snapshot_stride and step % snapshot_stride == 0:
            snapshots.append((step, psi.copy()))

    record(0)
    vec = psi.values.ravel()
    for step in range(1, steps + 1):
        vec = lu.solve(b_mat @ vec)
        if not np.all(np.isfinite(vec)):
            raise LinearSolveFailure(f"non-finite state at step {step}")
        psi = WaveFunction(values=vec.reshape(op.grid.shape), grid=op.grid)
        record(step)

    return EvolutionTrace(
        times=times, norms=norms, energies=energies,
        observables=obs_series, snapshots=snapshots,
    )
