"""Structure theory: derivations, distinguished derivations, substructures.

Everything here reduces to dense complex linear algebra on the structure
tensor: the derivation algebra is the kernel of the infinitesimal action, the
center/annihilator are kernels of the obvious commutation systems, the
radical comes from the trace-form criterion on the unitization (with an a
posteriori nilpotency-and-ideal guard), and the compatible-intertwiner pairs
of a nilpotent algebra feed the semidirect-sum constructor that produces new
critical points from old ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import AlgebraTensor, act_lie, is_associative
from .linalg import (
    hermitian_eig,
    lstsq_min_norm,
    nullspace,
    orthonormal_range,
    subspace_contains,
    subspace_dim_of_union,
)
from .moment import CriticalReport, RationalReconstructionError

DEFAULT_TOL = 1e-9


class RadicalVerificationError(ArithmeticError):
    """The trace-form radical failed its nilpotent-ideal verification."""


# ---------------------------------------------------------------------------
# Derivation algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivationBasis:
    """Orthonormal (Frobenius) basis of the derivation algebra."""

    basis: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def infinitesimal_action_matrix(mu: AlgebraTensor) -> np.ndarray:
    """Matrix of A -> A.mu as a map from n^2 matrix entries to n^3 tensor entries."""
    n = mu.dim
    c = mu.c
    eye = np.eye(n)
    t = (
        np.einsum("kp,ijq->ijkpq", eye, c)
        - np.einsum("iq,pjk->ijkpq", eye, c)
        - np.einsum("jq,ipk->ijkpq", eye, c)
    )
    return t.reshape(n**3, n**2)


def derivation_algebra(mu: AlgebraTensor, tol: float = DEFAULT_TOL) -> DerivationBasis:
    """Orthonormal basis of Der(mu), the kernel of A -> A.mu."""
    n = mu.dim
    kernel = nullspace(infinitesimal_action_matrix(mu), tol, scale=mu.norm)
    return DerivationBasis(tuple(kernel[:, j].reshape(n, n) for j in range(kernel.shape[1])))


# ---------------------------------------------------------------------------
# Nikolayevsky derivation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NikolayevskyResult:
    """The Nikolayevsky derivation: semisimple, real rational spectrum,
    normalized against the derivation algebra by tr(phi psi) = tr(psi).

    eigen_rationals is the full spectrum (n entries, ascending) as exact
    fractions; trace_residual is the worst defect of the defining trace
    identity over the derivation basis.  exact_spectrum_verified reports the
    optional integer-constraint reconstruction cross-check (None when the
    constraint system was inconsistent with the numerical spectrum).
    """

    phi: np.ndarray
    eigen_rationals: tuple[Fraction, ...]
    is_semisimple: bool
    trace_residual: float
    exact_spectrum_verified: bool | None = None

    def to_json_dict(self) -> dict:
        return {
            "phi": [[[z.real, z.imag] for z in row] for row in self.phi],
            "eigenvalues": [[f.numerator, f.denominator] for f in self.eigen_rationals],
            "is_semisimple": self.is_semisimple,
            "trace_residual": self.trace_residual,
            "exact_spectrum_verified": self.exact_spectrum_verified,
        }


def _cluster_real(values: np.ndarray, tol: float) -> tuple[list[float], list[int]]:
    order = np.sort(values)
    means: list[float] = []
    counts: list[int] = []
    start = 0
    for i in range(1, len(order) + 1):
        if i == len(order) or order[i] - order[i - 1] > tol:
            means.append(float(order[start:i].mean()))
            counts.append(i - start)
            start = i
    return means, counts


def _is_diagonalizable(m: np.ndarray, means: list[float], counts: list[int],
                       tol: float = 1e-6) -> bool:
    n = m.shape[0]
    scale = max(1.0, float(np.linalg.norm(m)))
    for mean, count in zip(means, counts):
        s = np.linalg.svd(m - mean * np.eye(n), compute_uv=False)
        rank = int(np.sum(s > tol * scale))
        if rank != n - count:
            return False
    return True


def _semisimple_part(m: np.ndarray, means: list[float], counts: list[int]) -> np.ndarray:
    """Semisimple part via Hermite interpolation: p(lam_j) = lam_j and
    p^(t)(lam_j) = 0 for 0 < t < multiplicity; then p(m) kills the nilpotent
    part block by block."""
    degree = sum(counts)
    rows = []
    rhs = []
    for mean, count in zip(means, counts):
        for t in range(count):
            row = np.zeros(degree, dtype=complex)
            for p in range(t, degree):
                row[p] = math.perm(p, t) * mean ** (p - t)
            rows.append(row)
            rhs.append(mean if t == 0 else 0.0)
    coeffs = np.linalg.solve(np.array(rows), np.array(rhs, dtype=complex))
    out = np.zeros_like(m)
    for p in reversed(range(degree)):
        out = out @ m + coeffs[p] * np.eye(m.shape[0])
    return out


def exact_rational_spectrum(means: list[float], counts: list[int],
                            tol: float = 1e-6) -> list[Fraction] | None:
    """Exact rational eigenvalues from the additive constraints they satisfy.

    Collect all index triples with c_i + c_j = c_k on the clustered spectrum,
    reduce the constraint rows e_i + e_j - e_k to a basis E, and solve the
    trace-normalization system exactly over the rationals:

        D (c - 1) = E^T b,  E c = 0,  E 1 = 1   with D = diag(multiplicities)

    which pins c = 1 + D^-1 E^T (E D^-1 E^T)^-1 (-1).  Returns None when the
    detected constraints are inconsistent with the numerical spectrum.
    """
    r = len(means)
    rows: list[list[Fraction]] = []
    for i in range(r):
        for j in range(i, r):
            for k in range(r):
                if abs(means[i] + means[j] - means[k]) <= tol:
                    row = [Fraction(0)] * r
                    row[i] += 1
                    row[j] += 1
                    row[k] -= 1
                    if any(row):
                        rows.append(row)
    basis = _row_basis(rows)
    if not basis:
        candidate = [Fraction(1)] * r
    else:
        s = len(basis)
        dinv = [Fraction(1, d) for d in counts]
        gram = [[sum(basis[a][i] * dinv[i] * basis[b][i] for i in range(r)) for b in range(s)]
                for a in range(s)]
        b_vec = _solve_fraction(gram, [Fraction(-1)] * s)
        if b_vec is None:
            return None
        candidate = [Fraction(1) + dinv[i] * sum(basis[a][i] * b_vec[a] for a in range(s))
                     for i in range(r)]
        for row in basis:  # detected constraints must hold exactly
            if sum(ci * ri for ci, ri in zip(candidate, row)) != 0:
                return None
    if any(abs(float(ci) - mi) > 10 * tol * max(1.0, abs(mi)) for ci, mi in zip(candidate, means)):
        return None
    return candidate


def _row_basis(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Subset of rows forming a basis of their span (exact Gaussian elimination)."""
    basis: list[list[Fraction]] = []
    reduced: list[list[Fraction]] = []
    for row in rows:
        work = list(row)
        for red in reduced:
            pivot = next(i for i, x in enumerate(red) if x != 0)
            if work[pivot] != 0:
                factor = work[pivot] / red[pivot]
                work = [w - factor * x for w, x in zip(work, red)]
        if any(work):
            basis.append(row)
            reduced.append(work)
    return basis


def _solve_fraction(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Solve a square exact rational system by Gaussian elimination."""
    n = len(a)
    m = [row[:] + [bi] for row, bi in zip(a, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def nikolayevsky(mu: AlgebraTensor, tol: float = DEFAULT_TOL,
                 cluster_tol: float = 1e-6, max_den: int = 64) -> NikolayevskyResult:
    """The derivation phi with tr(phi psi) = tr(psi) for every derivation psi.

    Solved as a minimal-norm least-squares problem on the (complex-symmetric,
    possibly singular) Gram system of a derivation basis.  Any solution has
    the same spectrum, which is real and rational; the semisimple part is
    extracted when the raw solution is defective.
    """
    n = mu.dim
    ders = derivation_algebra(mu, tol)
    if ders.dim == 0:
        # No derivations at all: the zero map satisfies the condition vacuously.
        return NikolayevskyResult(np.zeros((n, n), dtype=complex), (Fraction(0),) * n,
                                  True, 0.0, None)
    gram = np.array([[np.trace(bi @ bj) for bj in ders.basis] for bi in ders.basis])
    target = np.array([np.trace(b) for b in ders.basis])
    coeffs, _ = lstsq_min_norm(gram, target)
    phi = sum(x * b for x, b in zip(coeffs, ders.basis))
    trace_residual = max(abs(np.trace(phi @ b) - np.trace(b)) for b in ders.basis)
    eigs = np.linalg.eigvals(phi)
    if np.abs(eigs.imag).max(initial=0.0) > 1e-6 * max(1.0, np.abs(eigs).max(initial=0.0)):
        raise ArithmeticError(
            f"distinguished derivation has non-real spectrum {eigs}; numerical trouble")
    means, counts = _cluster_real(eigs.real, cluster_tol)
    diagonalizable = _is_diagonalizable(phi, means, counts)
    if not diagonalizable:
        phi = _semisimple_part(phi, means, counts)
        trace_residual = max(
            trace_residual,
            max(abs(np.trace(phi @ b) - np.trace(b)) for b in ders.basis),
        )
        diagonalizable = _is_diagonalizable(phi, means, counts)
    rationals: list[Fraction] = []
    for mean, count in zip(means, counts):
        frac = Fraction(mean).limit_denominator(max_den)
        if abs(float(frac) - mean) > 10 * cluster_tol * max(1.0, abs(mean)):
            raise RationalReconstructionError(
                f"eigenvalue {mean!r} has no rational fit with denominator <= {max_den}")
        rationals.extend([frac] * count)
    exact = exact_rational_spectrum(means, counts, cluster_tol)
    verified = None
    if exact is not None:
        distinct = sorted(set(rationals))
        verified = distinct == sorted(exact) and len(exact) == len(means)
    return NikolayevskyResult(phi, tuple(sorted(rationals)), diagonalizable,
                              float(trace_residual), verified)


# ---------------------------------------------------------------------------
# Center, annihilator, radical
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubstructureReport:
    """Orthonormal bases (columns) of the center, annihilator and radical."""

    center: np.ndarray
    annihilator: np.ndarray
    radical: np.ndarray

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.center.shape[1], self.annihilator.shape[1], self.radical.shape[1])

    def to_json_dict(self) -> dict:
        def vecs(basis: np.ndarray) -> list:
            return [[[z.real, z.imag] for z in basis[:, j]] for j in range(basis.shape[1])]
        return {"center": vecs(self.center), "annihilator": vecs(self.annihilator),
                "radical": vecs(self.radical)}


def center_system(mu: AlgebraTensor) -> np.ndarray:
    """Linear system whose kernel is the center {x : xy = yx for all y}."""
    c = mu.c
    asym = c - c.transpose(1, 0, 2)  # x e_j - e_j x per coordinate
    return asym.transpose(1, 2, 0).reshape(mu.dim**2, mu.dim)


def annihilator_system(mu: AlgebraTensor) -> np.ndarray:
    """Linear system whose kernel is {x : xy = yx = 0 for all y}."""
    c = mu.c
    left = c.transpose(1, 2, 0).reshape(mu.dim**2, mu.dim)               # x e_j
    right = c.transpose(1, 0, 2).transpose(1, 2, 0).reshape(mu.dim**2, mu.dim)  # e_j x
    return np.vstack([left, right])


def unitization(mu: AlgebraTensor) -> AlgebraTensor:
    """Adjoin a two-sided unit as basis vector e_1 of a (n+1)-dim algebra."""
    n = mu.dim
    c = np.zeros((n + 1, n + 1, n + 1), dtype=complex)
    c[1:, 1:, 1:] = mu.c
    for a in range(n + 1):
        c[0, a, a] += 1.0
        if a:
            c[a, 0, a] += 1.0
    return AlgebraTensor(n + 1, c)


def radical_system(mu: AlgebraTensor) -> np.ndarray:
    """Trace-form system on the unitization whose kernel is the radical.

    Over the complex numbers the kernel of x -> tr(L+_x L+_y) on the
    unitization is the maximal nilpotent ideal (the char-0 trace-form
    criterion); verification is the caller's business.
    """
    n = mu.dim
    unit = unitization(mu)
    lefts = [unit.left_mult(np.eye(n + 1)[a]) for a in range(n + 1)]
    return np.array([[np.trace(lefts[a + 1] @ lefts[y]) for a in range(n)]
                     for y in range(n + 1)])


def _radical_scale(mu: AlgebraTensor) -> float:
    # Trace form entries are quadratic in the constants plus O(n) unit terms.
    return max(float(mu.dim), mu.norm_sq)


def subspace_products(mu: AlgebraTensor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Columns spanning mu(span a, span b)."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((mu.dim, 0), dtype=complex)
    prods = np.einsum("ijk,ia,jb->kab", mu.c, a, b).reshape(mu.dim, -1)
    return orthonormal_range(prods, 1e-12)


def _verify_radical(mu: AlgebraTensor, radical: np.ndarray, tol: float) -> None:
    n = mu.dim
    eye = np.eye(n, dtype=complex)
    into = subspace_products(mu, radical, eye)
    onto = subspace_products(mu, eye, radical)
    if not (subspace_contains(radical, into, tol) and subspace_contains(radical, onto, tol)):
        raise RadicalVerificationError("trace-form radical is not an ideal")
    power = radical
    for _ in range(n + 1):
        if power.shape[1] == 0:
            return
        power = subspace_products(mu, radical, power)
        power = power[:, np.linalg.norm(power, axis=0) > tol]
    raise RadicalVerificationError("trace-form radical is not nilpotent")


def substructures(mu: AlgebraTensor, tol: float = DEFAULT_TOL, *,
                  require_associative: bool = True,
                  verify_radical: bool = True,
                  assoc_tol: float = 1e-8) -> SubstructureReport:
    """Center, annihilator and radical of an associative tensor.

    Radical semantics require associativity; pass require_associative=False
    only when the radical slot is used as an opaque fingerprint (the flow's
    orbit invariants do this for arbitrary tensors).
    """
    if require_associative:
        check = is_associative(mu, assoc_tol)
        if not check:
            raise ValueError(
                f"substructures need an associative tensor (violation {check.max_violation:.2e})")
    center = nullspace(center_system(mu), tol, scale=mu.norm)
    annihilator = nullspace(annihilator_system(mu), tol, scale=mu.norm)
    radical = nullspace(radical_system(mu), tol, scale=_radical_scale(mu))
    if verify_radical:
        _verify_radical(mu, radical, max(1e-8, 10 * tol))
    return SubstructureReport(center, annihilator, radical)


# ---------------------------------------------------------------------------
# Eigenspace splitting and the critical-point structure theorem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenSplit:
    """Bases of the negative / zero / positive eigenspaces of a Hermitian map."""

    minus: np.ndarray
    zero: np.ndarray
    plus: np.ndarray


def eigenspace_split(d, tol: float = 1e-8) -> EigenSplit:
    """Split C^n by the sign of the eigenvalues of Hermitian d (|lam| <= tol is zero)."""
    eig = hermitian_eig(d)
    w, v = eig.eigenvalues, eig.eigenvectors
    return EigenSplit(
        minus=v[:, w < -tol],
        zero=v[:, np.abs(w) <= tol],
        plus=v[:, w > tol],
    )


@dataclass(frozen=True)
class StructureChecks:
    """Per-clause results of the critical-point structure theorem."""

    ann_in_plus: bool
    plus_in_radical: bool
    minus_in_center_and_radical: bool
    minus_avoids_annihilator: bool
    zero_block_adjoint_derivations: bool
    max_derivation_residual: float

    @property
    def all_pass(self) -> bool:
        return (self.ann_in_plus and self.plus_in_radical
                and self.minus_in_center_and_radical and self.minus_avoids_annihilator
                and self.zero_block_adjoint_derivations)

    def to_json_dict(self) -> dict:
        return {
            "ann_in_plus": self.ann_in_plus,
            "plus_in_radical": self.plus_in_radical,
            "minus_in_center_and_radical": self.minus_in_center_and_radical,
            "minus_avoids_annihilator": self.minus_avoids_annihilator,
            "zero_block_adjoint_derivations": self.zero_block_adjoint_derivations,
            "max_derivation_residual": self.max_derivation_residual,
            "all_pass": self.all_pass,
        }


def structure_checks(mu: AlgebraTensor, report: CriticalReport,
                     tol: float = 1e-7, rank_tol: float = DEFAULT_TOL) -> StructureChecks:
    """Verify the four structural containments forced at a critical point:
    ann(mu) in A+, A+ in N(mu), A- in (C(mu) cap N(mu)) avoiding ann(mu), and
    (L_A - R_A)* a derivation for A in A0."""
    if not report.is_critical:
        raise ValueError("structure checks require a critical report")
    subs = substructures(mu, rank_tol)
    radius = float(np.abs(report.d_eigenvalues).max(initial=0.0))
    split = eigenspace_split(report.D, tol=1e-6 * max(1.0, radius))
    ann_in_plus = subspace_contains(split.plus, subs.annihilator, tol)
    plus_in_radical = subspace_contains(subs.radical, split.plus, tol)
    minus_in_cn = (subspace_contains(subs.center, split.minus, tol)
                   and subspace_contains(subs.radical, split.minus, tol))
    # Pointwise avoidance of the annihilator means trivial intersection.
    minus_avoids = (
        split.minus.shape[1] == 0
        or subspace_dim_of_union(split.minus, subs.annihilator, rank_tol)
        == split.minus.shape[1] + subs.annihilator.shape[1]
    )
    unit = mu.normalized()
    worst = 0.0
    for j in range(split.zero.shape[1]):
        a = split.zero[:, j]
        op = unit.left_mult(a) - unit.right_mult(a)
        worst = max(worst, act_lie(op.conj().T, unit).norm)
    return StructureChecks(
        ann_in_plus=ann_in_plus,
        plus_in_radical=plus_in_radical,
        minus_in_center_and_radical=minus_in_cn,
        minus_avoids_annihilator=minus_avoids,
        zero_block_adjoint_derivations=worst <= tol,
        max_derivation_residual=worst,
    )


# ---------------------------------------------------------------------------
# Compatible intertwiner pairs of a nilpotent algebra and semidirect sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaPair:
    """A pair (Phi, Psi) with Phi left-intertwining, Psi right-intertwining,
    lam(., Phi .) = lam(Psi ., .), each commuting with the opposite family."""

    Phi: np.ndarray
    Psi: np.ndarray

    def adjoint(self) -> "GammaPair":
        return GammaPair(self.Phi.conj().T, self.Psi.conj().T)

    def vec(self) -> np.ndarray:
        return np.concatenate([self.Phi.reshape(-1), self.Psi.reshape(-1)])


@dataclass(frozen=True)
class GammaStructure:
    """Intertwiner spaces of a nilpotent algebra.

    left/right are bases of the full intertwiner spaces; commuting_left /
    commuting_right impose commutation with the whole opposite family; pairs
    is a basis of the compatible pairs.  degenerate flags the zero algebra,
    where every pair qualifies.
    """

    left: tuple[np.ndarray, ...]
    right: tuple[np.ndarray, ...]
    commuting_left: tuple[np.ndarray, ...]
    commuting_right: tuple[np.ndarray, ...]
    pairs: tuple[GammaPair, ...]
    degenerate: bool
    product_closure_residual: float


def _left_intertwiner_system(lam: AlgebraTensor) -> np.ndarray:
    n = lam.dim
    c = lam.c
    eye = np.eye(n)
    t = np.einsum("kp,ijq->ijkpq", eye, c) - np.einsum("qi,pjk->ijkpq", eye, c)
    return t.reshape(n**3, n**2)


def _right_intertwiner_system(lam: AlgebraTensor) -> np.ndarray:
    n = lam.dim
    c = lam.c
    eye = np.eye(n)
    t = np.einsum("kp,ijq->ijkpq", eye, c) - np.einsum("qj,ipk->ijkpq", eye, c)
    return t.reshape(n**3, n**2)


def _matrices(kernel: np.ndarray, n: int) -> tuple[np.ndarray, ...]:
    return tuple(kernel[:, j].reshape(n, n) for j in range(kernel.shape[1]))


def _commutant_within(span: tuple[np.ndarray, ...], against: tuple[np.ndarray, ...],
                      tol: float) -> tuple[np.ndarray, ...]:
    if not span:
        return ()
    if not against:
        return span
    rows = np.array([np.concatenate([(f @ g - g @ f).reshape(-1) for g in against])
                     for f in span]).T
    coeffs = nullspace(rows, tol, scale=1.0)
    return tuple(sum(coeffs[p, j] * span[p] for p in range(len(span)))
                 for j in range(coeffs.shape[1]))


def gamma_structure(lam: AlgebraTensor, tol: float = DEFAULT_TOL,
                    nilpotency_tol: float = 1e-8) -> GammaStructure:
    """Intertwiner pair structure of a nilpotent associative tensor."""
    n = lam.dim
    degenerate = lam.is_zero()
    if not degenerate:
        subs = substructures(lam, tol)
        if subs.radical.shape[1] != n:
            raise ValueError("intertwiner pairs are defined for nilpotent algebras only")
    left = _matrices(nullspace(_left_intertwiner_system(lam), tol, scale=lam.norm), n)
    right = _matrices(nullspace(_right_intertwiner_system(lam), tol, scale=lam.norm), n)
    gl = _commutant_within(left, right, tol)
    gr = _commutant_within(right, left, tol)
    pairs: list[GammaPair] = []
    if gl or gr:
        c = lam.c
        cols = []
        for phi in gl:
            cols.append(np.einsum("mj,imk->ijk", phi, c).reshape(-1))
        for psi in gr:
            cols.append(-np.einsum("mi,mjk->ijk", psi, c).reshape(-1))
        system = np.array(cols).T
        kernel = nullspace(system, tol, scale=lam.norm)
        nl = len(gl)
        for j in range(kernel.shape[1]):
            phi = sum(kernel[p, j] * gl[p] for p in range(nl)) if nl else np.zeros((n, n), dtype=complex)
            psi = sum(kernel[nl + q, j] * gr[q] for q in range(len(gr))) if gr else np.zeros((n, n), dtype=complex)
            pairs.append(GammaPair(phi, psi))
    closure = 0.0
    if pairs:
        basis = np.column_stack([p.vec() for p in pairs])
        ortho = orthonormal_range(basis, tol)
        for p1 in pairs:
            for p2 in pairs:
                prod = GammaPair(p1.Phi @ p2.Phi, p2.Psi @ p1.Psi).vec()
                resid = prod - ortho @ (ortho.conj().T @ prod)
                closure = max(closure, float(np.linalg.norm(resid)))
    return GammaStructure(left, right, gl, gr, tuple(pairs), degenerate, closure)


def validate_gamma_pair(lam: AlgebraTensor, pair: GammaPair, tol: float = 1e-9) -> float:
    """Worst defect of the pair against the three defining identities."""
    c = lam.c
    phi, psi = pair.Phi, pair.Psi
    left_defect = np.einsum("kp,ijq,pq->ijk", np.eye(lam.dim), c, phi) \
        - np.einsum("mi,mjk->ijk", phi, c)
    right_defect = np.einsum("kp,ijq,pq->ijk", np.eye(lam.dim), c, psi) \
        - np.einsum("mj,imk->ijk", psi, c)
    compat = np.einsum("mj,imk->ijk", phi, c) - np.einsum("mi,mjk->ijk", psi, c)
    return float(max(np.abs(left_defect).max(initial=0.0),
                     np.abs(right_defect).max(initial=0.0),
                     np.abs(compat).max(initial=0.0)))


def semidirect_sum(pairs, lam: AlgebraTensor, critical: CriticalReport,
                   tol: float = 1e-8) -> AlgebraTensor:
    """Extend a nilpotent critical point by a *-closed algebra of pairs.

    The pairs act as an algebra S with product (P1,S1)(P2,S2) = (P1 P2, S2 S1);
    the result multiplies S-vectors through that product, S on lam-vectors by
    Phi (left) and Psi (right), and lam-vectors among themselves by lam.  The
    inner product on S is <H, K> = -(2/c) (tr L_H L_{K*} + tr H K*), and the
    output tensor is expressed on an orthonormal frame of the extended metric
    (lam frame first, then S).  The output is again critical, with type
    obtained from lam's by adjoining the eigenvalue 0 with multiplicity dim S.
    """
    pairs = list(pairs)
    m = lam.dim
    if not pairs:
        return lam
    if not critical.is_critical:
        raise ValueError("the nilpotent factor must come with a passing critical report")
    subs = substructures(lam, DEFAULT_TOL)
    if subs.radical.shape[1] != m:
        raise ValueError("the factor algebra is not nilpotent")
    for idx, pair in enumerate(pairs):
        defect = validate_gamma_pair(lam, pair, tol)
        if defect > tol:
            raise ValueError(f"pair {idx} violates the intertwiner identities (defect {defect:.2e})")
    d_unit = critical.D / lam.norm_sq  # commutation is scale invariant
    for idx, pair in enumerate(pairs):
        comm = max(np.abs(d_unit @ pair.Phi - pair.Phi @ d_unit).max(),
                   np.abs(d_unit @ pair.Psi - pair.Psi @ d_unit).max())
        if comm > 1e-6 * max(1.0, float(np.abs(d_unit).max())):
            raise ValueError(f"pair {idx} does not commute with the derivation part")
    basis_mat = np.column_stack([p.vec() for p in pairs])
    s = len(pairs)

    def coords(vec: np.ndarray, what: str) -> np.ndarray:
        x, resid = lstsq_min_norm(basis_mat, vec)
        if resid > tol * max(1.0, float(np.linalg.norm(vec))):
            raise ValueError(f"span of pairs is not closed under {what} (residual {resid:.2e})")
        return x

    for pair in pairs:
        coords(pair.adjoint().vec(), "adjoints")
    gamma = np.zeros((s, s, s), dtype=complex)
    for a, pa in enumerate(pairs):
        for b, pb in enumerate(pairs):
            prod = GammaPair(pa.Phi @ pb.Phi, pb.Psi @ pa.Psi)
            gamma[a, b] = coords(prod.vec(), "products")
    lmats = [gamma[a].T for a in range(s)]  # left multiplication of S on itself
    adj_coords = [coords(p.adjoint().vec(), "adjoints") for p in pairs]
    c_lam = critical.c
    if c_lam >= 0:
        raise ValueError("critical constant must be negative")
    gram = np.zeros((s, s), dtype=complex)
    for a in range(s):
        for b in range(s):
            l_badj = sum(adj_coords[b][p] * lmats[p] for p in range(s))
            gram[a, b] = (-2.0 / c_lam) * (
                np.trace(lmats[a] @ l_badj)
                + np.trace(pairs[a].Phi @ pairs[b].Phi.conj().T)
                + np.trace(pairs[a].Psi @ pairs[b].Psi.conj().T)
            )
    if np.linalg.norm(gram - gram.conj().T) > 1e-8 * max(1.0, np.linalg.norm(gram)):
        raise ValueError("extended inner product is not Hermitian; pairs are inconsistent")
    eig = hermitian_eig(gram)
    if eig.eigenvalues.min() <= tol:
        raise ValueError("extended inner product is not positive definite")
    transform = eig.eigenvectors @ np.diag(eig.eigenvalues**-0.5)  # H-coords -> orthonormal
    inverse = np.diag(eig.eigenvalues**0.5) @ eig.eigenvectors.conj().T
    ortho_pairs = [GammaPair(sum(transform[a, al] * pairs[a].Phi for a in range(s)),
                             sum(transform[a, al] * pairs[a].Psi for a in range(s)))
                   for al in range(s)]
    n = m + s
    c = np.zeros((n, n, n), dtype=complex)
    c[:m, :m, :m] = lam.c
    for al, op in enumerate(ortho_pairs):
        c[m + al, :m, :m] = op.Phi.T     # H . X = Phi(X)
        c[:m, m + al, :m] = op.Psi.T     # X . H = Psi(X)
    for al, pa in enumerate(ortho_pairs):
        for be, pb in enumerate(ortho_pairs):
            prod = GammaPair(pa.Phi @ pb.Phi, pb.Psi @ pa.Psi)
            c[m + al, m + be, m:] = inverse @ coords(prod.vec(), "products")
    result = AlgebraTensor(n, c)
    check = is_associative(result, 1e-8)
    if not check:
        raise ArithmeticError(
            f"semidirect sum failed associativity (violation {check.max_violation:.2e})")
    return result
