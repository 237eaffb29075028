"""Projected negative-gradient flow of the energy on the unit sphere.

The energy gradient is tangent to the basis-change orbits, so descent steps
are taken along the orbit itself: each accepted step applies exp(-8 eta M)
to the current tensor and renormalizes, which realizes the first-order
direction -grad F while keeping iterates in the starting orbit (the flat
step-then-renormalize retraction drifts off the orbit at second order, which
breaks orbit-minimum consistency near non-minimal critical points).

Convergence is detected on the gradient norm; limits are then handed to the
critical-point test at a relaxed tolerance.  Degenerations (limits outside
the starting orbit) are witnessed by jumps of the structure-invariant tuple
(dim Der, dim radical, dim annihilator, dim center).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import AlgebraTensor, act_lie, require_nonzero
from .moment import FLOW_CRITICAL_TOL, CriticalReport, critical_test, f_value, moment_matrix
from .linalg import hermitian_eig
from .structure import (
    annihilator_system,
    center_system,
    infinitesimal_action_matrix,
    radical_system,
)

ARMIJO = 1e-4
MIN_STEP = 1e-18
INVARIANT_RANK_TOL = 1e-5  # flow limits are only approximate


@dataclass(frozen=True)
class FlowConfig:
    step0: float | None = None  # default 0.1 / F(start)
    shrink: float = 0.5
    grad_tol: float = 1e-9
    max_iters: int = 200_000
    record_every: int = 100
    # A stall with the gradient already below this is the precision floor of
    # the Armijo test; such flows are polished with small fixed steps and
    # count as converged.
    stall_grad_tol: float = 1e-4
    polish_iters: int = 60

    def __post_init__(self):
        if self.step0 is not None and self.step0 <= 0:
            raise ValueError("step0 must be positive")
        if not (0.0 < self.shrink < 1.0):
            raise ValueError("shrink must lie in (0, 1)")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")


@dataclass(frozen=True)
class FlowTrace:
    iterates: tuple[AlgebraTensor, ...]
    f_values: tuple[float, ...]
    grad_norms: tuple[float, ...]
    final: AlgebraTensor
    converged: bool
    stalled: bool
    iterations: int
    start_invariants: tuple[int, int, int, int]
    final_invariants: tuple[int, int, int, int]
    final_report: CriticalReport

    def to_json_dict(self) -> dict:
        return {
            "converged": self.converged,
            "stalled": self.stalled,
            "iterations": self.iterations,
            "f_values": list(self.f_values),
            "grad_norms": list(self.grad_norms),
            "start_invariants": list(self.start_invariants),
            "final_invariants": list(self.final_invariants),
            "degenerated": detect_degeneration(self) if self.converged else None,
            "final_report": self.final_report.to_json_dict(),
        }


def _snapped_kernel_dim(svals: np.ndarray, tau: float, scale: float,
                        ratio: float = 30.0) -> int:
    """Numerical kernel dimension, snapped to the spectral gap nearest tau.

    A raw threshold misreads spectra whose tiny singular values sit close to
    it (flow limits are approached only approximately); instead the cut is
    placed in the largest-ratio gaps and the one closest to tau in log scale
    wins.  All-noise spectra count as full kernels.
    """
    floor = 1e-13 * max(scale, 1.0)
    s = np.sort(np.asarray(svals))
    n = len(s)
    tau = max(tau, floor)
    if n == 0 or s[-1] <= max(floor, tau):
        return n  # everything is below tolerance
    cuts = [(max(s[0], floor) / ratio, 0)]  # below everything
    for i in range(n - 1):
        lo, hi = max(s[i], floor), s[i + 1]
        # A cut cannot sit at the scale of the dominant singular values.
        if hi / lo >= ratio and lo * hi <= (0.5 * s[-1]) ** 2:
            cuts.append((float(np.sqrt(lo * hi)), i + 1))
    best = min(cuts, key=lambda c: abs(np.log(c[0] / tau)))
    return best[1]


def orbit_invariants(mu: AlgebraTensor,
                     tol: float = INVARIANT_RANK_TOL) -> tuple[int, int, int, int]:
    """(dim Der, dim radical, dim annihilator, dim center) at rank tolerance.

    Semicontinuity makes these a degeneration witness: they can only jump
    upward on the boundary of an orbit.  Kernel dimensions snap to spectral
    gaps near the tolerance.  For non-associative tensors the radical slot is
    the trace-form kernel dimension, used purely as a comparable fingerprint.
    The zero algebra is allowed and gives (n^2, n, n, n).
    """
    unit = mu if mu.is_zero() else mu.normalized()
    dims = []
    for system, scale in (
        (infinitesimal_action_matrix(unit), 1.0),
        (radical_system(unit), 1.0),
        (annihilator_system(unit), 1.0),
        (center_system(unit), 1.0),
    ):
        svals = np.linalg.svd(system, compute_uv=False)
        dims.append(_snapped_kernel_dim(svals, tol * max(scale, float(svals.max(initial=0.0))),
                                        scale))
    return tuple(dims)


def detect_degeneration(trace: FlowTrace) -> bool:
    """True when the converged limit has different invariants than the start."""
    if not trace.converged:
        raise ValueError("degeneration detection needs a converged trace")
    return trace.start_invariants != trace.final_invariants


def _projected_gradient(unit: AlgebraTensor, m: np.ndarray, fval: float) -> AlgebraTensor:
    moved = act_lie(m, unit)
    grad = AlgebraTensor(unit.dim, -4.0 * fval * unit.c + 8.0 * moved.c)
    # Analytically tangent already; strip the radial component of the rounding noise.
    radial = complex(np.vdot(unit.c, grad.c)).real
    return AlgebraTensor(unit.dim, grad.c - radial * unit.c)


def _apply_group(h: np.ndarray, hinv: np.ndarray, mu: AlgebraTensor) -> AlgebraTensor:
    c = np.einsum("pi,qj,pqm,km->ijk", hinv, hinv, mu.c, h, optimize=True)
    moved = AlgebraTensor(mu.dim, c)
    return moved.normalized()


def _exp_step(m: np.ndarray, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """exp(-8 eta M0) and its inverse, M0 the traceless part of M (the trace
    part only rescales the tensor and is removed by normalization)."""
    n = m.shape[0]
    shifted = m - (m.trace() / n) * np.eye(n)
    eig = hermitian_eig(shifted)
    v = eig.eigenvectors
    fwd = (v * np.exp(-8.0 * eta * eig.eigenvalues)) @ v.conj().T
    bwd = (v * np.exp(8.0 * eta * eig.eigenvalues)) @ v.conj().T
    return fwd, bwd


# Per-step exponent bound keeps each orbit step well conditioned; the
# re-anchor threshold is hit only by flows that leave every bounded region of
# the orbit (degenerations), where approximate confinement is the best
# possible anyway.  Re-anchoring during normal descent would bake off-orbit
# rounding error that later steps amplify, so the threshold is deliberately
# high.
MAX_STEP_EXPONENT = 1.5
REANCHOR_COND = 1e6
# Armijo decreases below this absolute floor are floating-point noise.
NOISE_FLOOR = 1e3 * np.finfo(float).eps
# Relative ridge weight for the gauge-fixed step generator below.
RIDGE = 0.02


@lru_cache(maxsize=None)
def _hermitian_basis(n: int) -> np.ndarray:
    """Columns: vec of an orthonormal real basis of Hermitian n x n matrices."""
    cols = []
    for a in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[a, a] = 1.0
        cols.append(e.reshape(-1))
    for a in range(n):
        for b in range(a + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[a, b] = e[b, a] = 1.0 / np.sqrt(2.0)
            cols.append(e.reshape(-1))
            e = np.zeros((n, n), dtype=complex)
            e[a, b] = 1j / np.sqrt(2.0)
            e[b, a] = -1j / np.sqrt(2.0)
            cols.append(e.reshape(-1))
    out = np.column_stack(cols)
    out.setflags(write=False)
    return out


def _gauge_fixed_generator(x: AlgebraTensor, m: np.ndarray) -> np.ndarray:
    """Minimal-stretch Hermitian generator with the same first-order motion.

    Any generator congruent to M modulo the stabilizer of x produces the same
    descent curve on the orbit, but M itself contains (near-)derivations of
    the limit point, which stretch the accumulated basis change exponentially
    while leaving the tensor fixed.  Solving a ridge least-squares problem
    for the smallest Hermitian A whose action matches the non-radial part of
    M.x (that part equals grad F / 8) suppresses exactly those components.
    """
    n = x.dim
    target = act_lie(m, x).c.reshape(-1).copy()
    xvec = x.c.reshape(-1)
    target -= xvec * (np.vdot(xvec, target) / np.vdot(xvec, xvec))
    t_herm = infinitesimal_action_matrix(x) @ _hermitian_basis(n)
    t_real = np.vstack([t_herm.real, t_herm.imag])
    v_real = np.concatenate([target.real, target.imag])
    u, s, vh = np.linalg.svd(t_real, full_matrices=False)
    lam = RIDGE * (s[0] if s.size else 1.0)
    damped = s / (s * s + lam * lam)
    coeffs = vh.T @ (damped * (u.T @ v_real))
    gen = (_hermitian_basis(n) @ coeffs).reshape(n, n)
    return 0.5 * (gen + gen.conj().T)


def _descent_slope(x: AlgebraTensor, gen: np.ndarray, grad: AlgebraTensor) -> float:
    """Directional derivative of F along the step exp(-8 eta gen)."""
    direction = act_lie(-8.0 * gen, x).c.copy()
    direction -= complex(np.vdot(x.c, direction)).real * x.c
    return float(np.real(np.vdot(grad.c, direction)))


def _polish(anchor: AlgebraTensor, h: np.ndarray, hinv: np.ndarray,
            x: AlgebraTensor, fval: float, gnorm: float, eta: float,
            cfg: FlowConfig) -> tuple[AlgebraTensor, float, float]:
    """Fixed-step endgame below the Armijo noise floor; returns the iterate
    with the smallest gradient norm encountered."""
    best = (x, fval, gnorm)
    since_improved = 0
    for _ in range(cfg.polish_iters):
        m = moment_matrix(x).matrix
        gnorm = _projected_gradient(x, m, fval).norm
        if gnorm < best[2]:
            best = (x, fval, gnorm)
            since_improved = 0
        else:
            since_improved += 1
        if gnorm <= cfg.grad_tol or since_improved > 6:
            break
        gen = _gauge_fixed_generator(x, m)
        spread = float(np.ptp(hermitian_eig(gen).eigenvalues))
        eta = min(eta, MAX_STEP_EXPONENT / (8.0 * max(spread, 1e-12)))
        fwd, bwd = _exp_step(gen, eta)
        h, hinv = fwd @ h, hinv @ bwd
        x = _apply_group(h, hinv, anchor)
        fval = f_value(x)
    return best


def flow_to_critical(mu: AlgebraTensor, cfg: FlowConfig | None = None) -> FlowTrace:
    """Run energy descent from [mu] until the projected gradient norm drops
    below cfg.grad_tol or the budget is exhausted.

    Iterates are produced by applying an accumulated basis change to the
    starting tensor, so a flow from the conjugate of a critical point stays
    in that orbit to machine precision and converges to the orbit's critical
    value.  When the accumulated change becomes ill conditioned (the flow is
    leaving every bounded region of the orbit, i.e. degenerating) the anchor
    is reset; from there orbit confinement is only approximate, which is
    exactly the situation the invariants-based degeneration flag reports on.

    The input tensor itself carries rounding error of order eps off its
    mathematical orbit; once the in-orbit gradient is tiny, descent along
    that amplified seed shows up as a sharp gradient rebound.  The loop then
    returns to the best iterate seen and finishes with small fixed steps.
    """
    cfg = cfg or FlowConfig()
    anchor = require_nonzero(mu).normalized()
    x = anchor
    h = np.eye(mu.dim, dtype=complex)
    hinv = np.eye(mu.dim, dtype=complex)
    start_invariants = orbit_invariants(x)
    fval = f_value(x)
    step = cfg.step0 if cfg.step0 is not None else 0.1 / fval
    f_samples = [fval]
    g_samples: list[float] = []
    iterates = [x]
    converged = False
    stalled = False
    iteration = 0
    best = (x, h, hinv, fval, np.inf)  # smallest gradient norm seen
    while iteration < cfg.max_iters:
        m = moment_matrix(x).matrix
        grad = _projected_gradient(x, m, fval)
        gnorm = grad.norm
        if iteration == 0:
            g_samples.append(gnorm)
        if gnorm <= cfg.grad_tol:
            converged = True
            break
        if gnorm < best[4]:
            best = (x, h, hinv, fval, gnorm)
        elif best[4] <= cfg.stall_grad_tol and gnorm >= 10.0 * best[4]:
            # Sub-threshold minimum followed by a sharp rebound: the descent
            # has switched to the off-orbit rounding seed.  Finish from the
            # best point.
            x, h, hinv, fval, gnorm = best
            x, fval, gnorm = _polish(anchor, h, hinv, x, fval, gnorm,
                                     step * cfg.shrink, cfg)
            converged = True
            break
        gen = _gauge_fixed_generator(x, m)
        slope = _descent_slope(x, gen, grad)  # d/d eta of F, should be < 0
        accepted = False
        if slope < 0:
            spread = float(np.ptp(hermitian_eig(gen).eigenvalues))
            eta = min(step, MAX_STEP_EXPONENT / (8.0 * max(spread, 1e-12)))
            while eta >= MIN_STEP:
                fwd, bwd = _exp_step(gen, eta)
                h_trial = fwd @ h
                hinv_trial = hinv @ bwd
                candidate = _apply_group(h_trial, hinv_trial, anchor)
                f_cand = f_value(candidate)
                if f_cand <= fval + ARMIJO * eta * slope - NOISE_FLOOR * max(1.0, fval):
                    accepted = True
                    break
                eta *= cfg.shrink
        if not accepted:
            # Armijo hit the floating-point floor.  With a small gradient
            # this is the quadratic-convergence endgame: finish with a short
            # run of fixed small steps, keeping the best iterate.
            if gnorm <= cfg.stall_grad_tol:
                x, fval, gnorm = _polish(anchor, h, hinv, x, fval, gnorm,
                                         max(eta, MIN_STEP) / cfg.shrink, cfg)
                converged = True
            stalled = True
            break
        x, fval = candidate, f_cand
        h, hinv = h_trial / np.linalg.norm(h_trial, 2), hinv_trial * np.linalg.norm(h_trial, 2)
        if np.linalg.cond(h) > REANCHOR_COND:
            anchor, h, hinv = x, np.eye(mu.dim, dtype=complex), np.eye(mu.dim, dtype=complex)
        step = eta / cfg.shrink  # let accepted steps regrow
        iteration += 1
        if iteration % cfg.record_every == 0:
            f_samples.append(fval)
            g_samples.append(gnorm)
            iterates.append(x)
    if f_samples[-1] != fval:
        f_samples.append(fval)
        iterates.append(x)
    final_gnorm = _projected_gradient(x, moment_matrix(x).matrix, fval).norm
    g_samples.append(final_gnorm)
    report = critical_test(x, tol=FLOW_CRITICAL_TOL, cluster_tol=1e-4)
    # The limit is approached to distance ~ sqrt(gradient norm) along the
    # flattest directions, so judge the final invariants at that scale.
    final_tol = max(INVARIANT_RANK_TOL, 10.0 * float(np.sqrt(max(final_gnorm, 0.0))))
    return FlowTrace(
        iterates=tuple(iterates),
        f_values=tuple(f_samples),
        grad_norms=tuple(g_samples),
        final=x,
        converged=converged,
        stalled=stalled,
        iterations=iteration,
        start_invariants=start_invariants,
        final_invariants=orbit_invariants(x, final_tol),
        final_report=report,
    )
