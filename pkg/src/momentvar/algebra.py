"""Points of the variety of n-dimensional complex algebras.

An algebra is a structure-constant tensor c[i, j, k] on a fixed orthonormal
frame {e_1, ..., e_n}: the product is e_i e_j = sum_k c[i, j, k] e_k.  This
module provides the basis-change (group) action, its infinitesimal (Lie
algebra) action, the Hermitian inner product on tensors, associativity
checking, scaled direct sums, and the JSON wire format.

Indices are 0-based internally; the JSON format is 1-based.
"""

from __future__ import annotations

import cmath
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

ILL_CONDITIONED = 1e12


class AlgebraJSONError(ValueError):
    """Malformed algebra JSON: bad schema, out-of-range or duplicate index."""


@dataclass(frozen=True)
class AlgebraTensor:
    """Structure-constant tensor of an n-dimensional complex algebra.

    c has shape (n, n, n) with c[i, j, k] the e_k coefficient of e_i e_j.
    Instances are immutable; all operations return new tensors.
    """

    dim: int
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.c, dtype=complex))
        n = self.dim
        if arr.shape != (n, n, n):
            raise ValueError(f"structure tensor must have shape {(n, n, n)}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("structure tensor has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "c", arr)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.c, self.c).real)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.c))

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.norm <= tol

    def scaled(self, t: complex) -> "AlgebraTensor":
        return AlgebraTensor(self.dim, t * self.c)

    def normalized(self) -> "AlgebraTensor":
        nrm = self.norm
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero tensor")
        return AlgebraTensor(self.dim, self.c / nrm)

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Multiply two coordinate vectors in this algebra."""
        return np.einsum("ijk,i,j->k", self.c, x, y)

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> xy."""
        return np.einsum("ijk,i->kj", self.c, x)

    def right_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> yx."""
        return np.einsum("ijk,j->ki", self.c, x)

    @classmethod
    def zero(cls, dim: int) -> "AlgebraTensor":
        return cls(dim, np.zeros((dim, dim, dim), dtype=complex))

    @classmethod
    def from_terms(cls, dim: int, terms: dict[tuple[int, int, int], complex]) -> "AlgebraTensor":
        """Build from 1-based {(i, j, k): coefficient} relations."""
        c = np.zeros((dim, dim, dim), dtype=complex)
        for (i, j, k), coeff in terms.items():
            if not (1 <= i <= dim and 1 <= j <= dim and 1 <= k <= dim):
                raise ValueError(f"index triple {(i, j, k)} out of range for dim {dim}")
            c[i - 1, j - 1, k - 1] = coeff
        return cls(dim, c)


def require_nonzero(mu: AlgebraTensor) -> AlgebraTensor:
    if mu.is_zero():
        raise ValueError("operation undefined for the zero tensor")
    return mu


def act_group(g, mu: AlgebraTensor) -> AlgebraTensor:
    """Basis-change action: (g.mu)(x, y) = g mu(g^-1 x, g^-1 y)."""
    gm = np.asarray(g, dtype=complex)
    if gm.shape != (mu.dim, mu.dim):
        raise ValueError(f"group element must be {mu.dim}x{mu.dim}, got {gm.shape}")
    try:
        ginv = np.linalg.inv(gm)
    except np.linalg.LinAlgError as exc:
        raise ValueError("group element is singular") from exc
    cond = np.linalg.cond(gm)
    if cond > ILL_CONDITIONED:
        warnings.warn(f"basis change is ill conditioned (cond ~ {cond:.2e})", stacklevel=2)
    c = np.einsum("pi,qj,pqm,km->ijk", ginv, ginv, mu.c, gm, optimize=True)
    return AlgebraTensor(mu.dim, c)


def act_lie(a, mu: AlgebraTensor) -> AlgebraTensor:
    """Infinitesimal action: (A.mu)(x, y) = A mu(x, y) - mu(Ax, y) - mu(x, Ay).

    A.mu = 0 exactly when A is a derivation of mu.
    """
    am = np.asarray(a, dtype=complex)
    if am.shape != (mu.dim, mu.dim):
        raise ValueError(f"Lie algebra element must be {mu.dim}x{mu.dim}, got {am.shape}")
    c = mu.c
    out = (
        np.einsum("km,ijm->ijk", am, c)
        - np.einsum("mi,mjk->ijk", am, c)
        - np.einsum("mj,imk->ijk", am, c)
    )
    return AlgebraTensor(mu.dim, out)


def inner_product(mu: AlgebraTensor, lam: AlgebraTensor) -> complex:
    """Hermitian inner product sum_{ijk} c_mu[ijk] conj(c_lam[ijk])."""
    if mu.dim != lam.dim:
        raise ValueError("tensors have different dimensions")
    return complex(np.vdot(lam.c, mu.c))  # vdot conjugates its first argument


@dataclass(frozen=True)
class AssociativityCheck:
    ok: bool
    max_violation: float

    def __bool__(self) -> bool:
        return self.ok


def is_associative(mu: AlgebraTensor, tol: float = 1e-9) -> AssociativityCheck:
    """Check x(yz) = (xy)z on all basis triples.

    The associator is quadratic in the structure constants, so the threshold
    scales with max(1, ||mu||^2); for exact-integer inputs this is just tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = mu.c
    left = np.einsum("jkm,iml->ijkl", c, c)  # e_i (e_j e_k)
    right = np.einsum("ijm,mkl->ijkl", c, c)  # (e_i e_j) e_k
    violation = float(np.abs(left - right).max()) if c.size else 0.0
    return AssociativityCheck(violation <= tol * max(1.0, mu.norm_sq), violation)


def direct_sum(mu: AlgebraTensor, lam: AlgebraTensor, t: complex = 1.0) -> AlgebraTensor:
    """Block tensor mu (+) t*lam on dimension n + m; cross products are zero."""
    if t == 0:
        raise ValueError("scale factor t must be nonzero")
    n, m = mu.dim, lam.dim
    if m == 0:
        return mu
    if n == 0:
        return lam.scaled(t)
    c = np.zeros((n + m, n + m, n + m), dtype=complex)
    c[:n, :n, :n] = mu.c
    c[n:, n:, n:] = t * lam.c
    return AlgebraTensor(n + m, c)


# JSON wire format: {"dim": n, "terms": [{"i":, "j":, "k":, "c": [re, im]}]},
# 1-based indices, duplicates rejected.

def to_json_dict(mu: AlgebraTensor, prune_tol: float = 0.0) -> dict:
    terms = []
    nz = np.argwhere(np.abs(mu.c) > prune_tol)
    for i, j, k in nz:
        coeff = mu.c[i, j, k]
        terms.append({"i": int(i) + 1, "j": int(j) + 1, "k": int(k) + 1,
                      "c": [float(coeff.real), float(coeff.imag)]})
    return {"dim": mu.dim, "terms": terms}


def from_json_dict(data) -> AlgebraTensor:
    if not isinstance(data, dict):
        raise AlgebraJSONError("algebra JSON must be an object")
    try:
        dim = data["dim"]
        terms = data["terms"]
    except (KeyError, TypeError) as exc:
        raise AlgebraJSONError("algebra JSON needs 'dim' and 'terms'") from exc
    if not isinstance(dim, int) or dim < 1:
        raise AlgebraJSONError("'dim' must be a positive integer")
    if not isinstance(terms, list):
        raise AlgebraJSONError("'terms' must be a list")
    c = np.zeros((dim, dim, dim), dtype=complex)
    seen: set[tuple[int, int, int]] = set()
    for term in terms:
        try:
            i, j, k = term["i"], term["j"], term["k"]
            re, im = term["c"]
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraJSONError(f"malformed term {term!r}") from exc
        if not all(isinstance(x, int) for x in (i, j, k)):
            raise AlgebraJSONError(f"indices must be integers in term {term!r}")
        if not (1 <= i <= dim and 1 <= j <= dim and 1 <= k <= dim):
            raise AlgebraJSONError(f"index out of range in term {term!r}")
        if (i, j, k) in seen:
            raise AlgebraJSONError(f"duplicate index triple {(i, j, k)}")
        seen.add((i, j, k))
        c[i - 1, j - 1, k - 1] = complex(float(re), float(im))
    return AlgebraTensor(dim, c)


def dumps(mu: AlgebraTensor, **kwargs) -> str:
    return json.dumps(to_json_dict(mu), **kwargs)


def loads(text: str) -> AlgebraTensor:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraJSONError(f"invalid JSON: {exc}") from exc
    return from_json_dict(data)


def format_relations(mu: AlgebraTensor, tol: float = 1e-12) -> str:
    """Human-readable product relations, e.g. 'e1*e1 = e2'."""
    parts = []
    n = mu.dim
    for i in range(n):
        for j in range(n):
            coeffs = mu.c[i, j]
            if np.abs(coeffs).max(initial=0.0) <= tol:
                continue
            terms = []
            for k in range(n):
                z = coeffs[k]
                if abs(z) <= tol:
                    continue
                if abs(z - 1) <= tol:
                    terms.append(f"e{k + 1}")
                elif abs(z + 1) <= tol:
                    terms.append(f"-e{k + 1}")
                elif abs(z.imag) <= tol:
                    terms.append(f"{z.real:.6g}*e{k + 1}")
                else:
                    terms.append(f"({z:.6g})*e{k + 1}")
            parts.append(f"e{i + 1}*e{j + 1} = " + " + ".join(terms).replace("+ -", "- "))
    return "; ".join(parts) if parts else "zero algebra"


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Ginibre matrix."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_invertible(n: int, rng: np.random.Generator, max_cond: float = 1e4) -> np.ndarray:
    """Complex Ginibre matrix, resampled if absurdly ill conditioned."""
    while True:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if np.linalg.cond(z) <= max_cond:
            return z


def random_phase(rng: np.random.Generator) -> complex:
    return cmath.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
