"""Moment-map matrix, energy functional, gradient and critical-point tests.

For a nonzero structure tensor mu with left/right multiplications L_i, R_i on
an orthonormal frame, the moment-map matrix is the Hermitian matrix

    M(mu) = 2 sum_i L_i L_i* - 2 sum_i L_i* L_i - 2 sum_i R_i* R_i,

and the energy is F(mu) = tr M(mu)^2 / ||mu||^4, the squared norm of the
moment map on the projective space of tensors.  [mu] is a critical point of F
exactly when M(mu) = c I + D with c real (necessarily negative) and D a
derivation of mu; the integer spectrum pattern of D, rescaled to coprime
integers, is the critical type, and the energy is a closed-form function of
the type alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import AlgebraTensor, act_lie, require_nonzero
from .linalg import hermitian_eig

DEFAULT_CRITICAL_TOL = 1e-7  # exact catalog inputs
FLOW_CRITICAL_TOL = 1e-5     # limits reached by the discretized flow
DEFAULT_CLUSTER_TOL = 1e-6
DEFAULT_MAX_DEN = 64


class RationalReconstructionError(ValueError):
    """No small-denominator rational pattern fits the eigenvalue clusters."""


@dataclass(frozen=True)
class MomentMatrix:
    """Moment-map matrix together with the tensor norm it was computed at."""

    matrix: np.ndarray
    norm_sq: float


def moment_matrix(mu: AlgebraTensor) -> MomentMatrix:
    """Moment-map matrix of a nonzero tensor.

    Hermitian by construction, with the forced identity tr M = -2 ||mu||^2
    checked before returning.
    """
    require_nonzero(mu)
    c = mu.c
    cc = c.conj()
    # sum_i L_i L_i*           -> gram of products by target index
    # sum_i L_i* L_i           -> gram of left-multiplication slots
    # sum_i R_i* R_i           -> gram of right-multiplication slots
    left_gram = np.einsum("ijk,ijl->kl", c, cc, optimize=True)
    left_slot = np.einsum("ikm,ilm->kl", cc, c, optimize=True)
    right_slot = np.einsum("kim,lim->kl", cc, c, optimize=True)
    m = 2.0 * left_gram - 2.0 * left_slot - 2.0 * right_slot
    norm_sq = mu.norm_sq
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(m - m.conj().T) > 1e-10 * scale:
        raise ArithmeticError("moment matrix lost Hermitian symmetry")
    if abs(m.trace().real + 2.0 * norm_sq) > 1e-9 * max(1.0, norm_sq):
        raise ArithmeticError("moment matrix trace identity violated")
    return MomentMatrix(0.5 * (m + m.conj().T), norm_sq)


def f_value(mu: AlgebraTensor) -> float:
    """Energy F(mu) = tr M(mu)^2 / ||mu||^4.  Scale invariant, >= 4/n."""
    mm = moment_matrix(mu)
    tr_m2 = float(np.einsum("ij,ji->", mm.matrix, mm.matrix).real)
    return tr_m2 / mm.norm_sq**2


def euclidean_gradient(mu: AlgebraTensor) -> AlgebraTensor:
    """Gradient of the energy on nonzero tensors.

    grad F(mu) = -4 F(mu) mu / ||mu||^2 + 8 M(mu).mu / ||mu||^4, which is
    tangent to the basis-change orbit (and vanishes at critical points).
    """
    mm = moment_matrix(mu)
    nsq = mm.norm_sq
    tr_m2 = float(np.einsum("ij,ji->", mm.matrix, mm.matrix).real)
    fval = tr_m2 / nsq**2
    moved = act_lie(mm.matrix, mu)
    return AlgebraTensor(mu.dim, (-4.0 * fval / nsq) * mu.c + (8.0 / nsq**2) * moved.c)


@dataclass(frozen=True)
class CriticalReport:
    """Result of the critical-point test at a tensor.

    c and D are reported at the input scale (so exact-integer catalog inputs
    reproduce hand calculations); the residual is measured on the normalized
    tensor and is scale free.  type_ks/type_ds are filled only when the
    residual passes the tolerance.
    """

    c: float
    D: np.ndarray
    residual: float
    tol: float
    value: float
    d_eigenvalues: np.ndarray
    type_ks: tuple[int, ...] | None = None
    type_ds: tuple[int, ...] | None = None

    @property
    def is_critical(self) -> bool:
        return self.residual <= self.tol

    def type_str(self) -> str:
        if self.type_ks is None:
            return "-"
        return format_type(self.type_ks, self.type_ds)

    def to_json_dict(self) -> dict:
        ty = None
        if self.type_ks is not None:
            ty = {"ks": list(self.type_ks), "ds": list(self.type_ds)}
        return {
            "c": self.c,
            "residual": self.residual,
            "critical": self.is_critical,
            "type": ty,
            "value": self.value,
            "D_eigenvalues": [float(x) for x in self.d_eigenvalues],
        }


def format_type(ks, ds) -> str:
    return "(" + "<".join(str(k) for k in ks) + ";" + ",".join(str(d) for d in ds) + ")"


def critical_test(mu: AlgebraTensor, tol: float = DEFAULT_CRITICAL_TOL,
                  cluster_tol: float = DEFAULT_CLUSTER_TOL,
                  max_den: int = DEFAULT_MAX_DEN) -> CriticalReport:
    """Test whether [mu] is a critical point of the energy.

    Internally works at unit norm: c = tr M^2 / tr M (well defined, tr M < 0),
    D = M - c I, residual = ||D.mu|| there.  Critical iff residual <= tol; the
    type is then reconstructed from the spectrum of D by small-denominator
    rational recovery and the value cross-checkable via value_from_type.
    """
    unit = require_nonzero(mu).normalized()
    mm = moment_matrix(unit)
    m = mm.matrix
    tr_m = float(m.trace().real)
    tr_m2 = float(np.einsum("ij,ji->", m, m).real)
    c_hat = tr_m2 / tr_m
    d_hat = m - c_hat * np.eye(mu.dim)
    residual = float(act_lie(d_hat, unit).norm)
    scale = mu.norm_sq
    eigs_hat = hermitian_eig(d_hat).eigenvalues
    report_kwargs: dict = {}
    if residual <= tol:
        ks, ds = critical_type(d_hat, cluster_tol=cluster_tol, max_den=max_den)
        report_kwargs = {"type_ks": ks, "type_ds": ds}
    return CriticalReport(
        c=c_hat * scale,
        D=d_hat * scale,
        residual=residual,
        tol=tol,
        value=tr_m2,
        d_eigenvalues=eigs_hat * scale,
        **report_kwargs,
    )


def _cluster(values: np.ndarray, tol: float) -> tuple[list[float], list[int]]:
    """Group sorted values whose successive gaps are <= tol; return means, counts."""
    means: list[float] = []
    counts: list[int] = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            block = values[start:i]
            means.append(float(block.mean()))
            counts.append(len(block))
            start = i
    return means, counts


def critical_type(d, cluster_tol: float = DEFAULT_CLUSTER_TOL,
                  max_den: int = DEFAULT_MAX_DEN) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Coprime integer type (k_1 < ... < k_r; d_1, ..., d_r) of a Hermitian D.

    Eigenvalues are normalized to unit spectral radius, clustered within
    cluster_tol, recovered as rationals with denominator <= max_den by
    continued fractions, cleared to integers and divided by their gcd.  D = 0
    gives (0; n).  D is expected on the scale of the unit-norm moment matrix.
    """
    eig = hermitian_eig(d)
    w = eig.eigenvalues
    n = len(w)
    radius = float(np.abs(w).max())
    if radius <= cluster_tol:
        return (0,), (n,)
    r = w / radius
    means, counts = _cluster(r, cluster_tol)
    fracs = [Fraction(m).limit_denominator(max_den) for m in means]
    for m, f in zip(means, fracs):
        if abs(m - float(f)) > cluster_tol:
            raise RationalReconstructionError(
                f"eigenvalue ratio {m!r} has no rational fit with denominator <= {max_den}")
    # Gap clustering can split a noisy repeated eigenvalue; clusters that
    # round to the same rational are one eigenvalue, so merge them.
    merged: dict[Fraction, int] = {}
    for f, count in zip(fracs, counts):
        merged[f] = merged.get(f, 0) + count
    fracs = sorted(merged)
    mults = [merged[f] for f in fracs]
    lcm = math.lcm(*(f.denominator for f in fracs))
    ints = [int(f * lcm) for f in fracs]
    g = math.gcd(*(abs(k) for k in ints))
    if g > 1:
        ints = [k // g for k in ints]
    return tuple(ints), tuple(mults)


def value_from_type(ks, ds, n: int) -> Fraction:
    """Closed-form critical value of a type on dimension n.

    (0; n) gives 4/n; otherwise 4 * (n - (sum k d)^2 / (sum k^2 d))^(-1).
    """
    ks = tuple(int(k) for k in ks)
    ds = tuple(int(d) for d in ds)
    if len(ks) != len(ds) or not ks:
        raise ValueError("type lists must be nonempty and of equal length")
    if sum(ds) != n:
        raise ValueError(f"multiplicities sum to {sum(ds)}, expected n = {n}")
    if any(d < 1 for d in ds):
        raise ValueError("multiplicities must be positive")
    if len(ks) == 1:
        if ks[0] != 0:
            raise ValueError("a single-eigenvalue type must be (0; n)")
        return Fraction(4, n)
    s1 = sum(k * d for k, d in zip(ks, ds))
    s2 = sum(k * k * d for k, d in zip(ks, ds))
    denom = Fraction(n) - Fraction(s1 * s1, s2)
    if denom <= 0:
        raise ValueError("type does not correspond to a critical point")
    return 4 / denom
