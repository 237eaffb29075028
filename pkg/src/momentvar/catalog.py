"""Named catalog of algebras: classification-table rows and standard families.

Covers the six 2-dimensional and twenty-two 3-dimensional associative
algebras (with their expected critical types and energy values where they
exist), the matrix algebras mat(m), the one-generator families mu_l(n),
mu_r(n), mu_ca(n), and the alternative models U13 / W103 / U03 used for the
rows d13 / d17 / d18 whose standard frame is not critical.

Structure constants are exact small integers/rationals; expected values are
stored as exact fractions.  Entry names are the wire-format identifiers used
by the CLI (`d15` with a dimension, `mat(2)`, `mu_l(4)`, `U13`, ...).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import AlgebraTensor

CriticalType = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dim: int
    tensor: AlgebraTensor
    expected_type: CriticalType | None = None
    expected_value: Fraction | None = None

    @property
    def expects_critical(self) -> bool:
        return self.expected_type is not None


def _tensor(dim: int, *terms: tuple[int, int, int] | tuple[int, int, int, complex]) -> AlgebraTensor:
    """Relations as (i, j, k[, coefficient]) meaning e_i e_j += coeff * e_k."""
    c = np.zeros((dim, dim, dim), dtype=complex)
    for term in terms:
        i, j, k = term[:3]
        coeff = term[3] if len(term) == 4 else 1.0
        c[i - 1, j - 1, k - 1] += coeff
    return AlgebraTensor(dim, c)


def _ty(ks: tuple[int, ...], ds: tuple[int, ...]) -> CriticalType:
    return (tuple(ks), tuple(ds))


# Two-dimensional classification table.
_DIM2: list[tuple[str, AlgebraTensor, CriticalType | None, Fraction | None]] = [
    ("d1", _tensor(2, (1, 1, 1)), _ty((0, 1), (1, 1)), Fraction(4)),
    ("d2", _tensor(2, (1, 1, 1), (1, 2, 2)), _ty((0, 1), (1, 1)), Fraction(4)),
    ("d3", _tensor(2, (1, 1, 1), (2, 1, 2)), _ty((0, 1), (1, 1)), Fraction(4)),
    ("d4", _tensor(2, (1, 1, 1), (2, 2, 2)), _ty((0,), (2,)), Fraction(2)),
    ("d5", _tensor(2, (1, 1, 2)), _ty((1, 2), (1, 1)), Fraction(20)),
    ("d6", _tensor(2, (1, 1, 1), (1, 2, 2), (2, 1, 2)), _ty((0, 1), (1, 1)), Fraction(4)),
]

# Three-dimensional classification table.  The d16 value is the one forced by
# the critical-value formula for its type (1<2<3;1,1,1); see the README note
# on the single deliberately-failing acceptance check.
_DIM3: list[tuple[str, AlgebraTensor, CriticalType | None, Fraction | None]] = [
    ("d1", _tensor(3, (1, 1, 1)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d2", _tensor(3, (1, 1, 1), (2, 2, 3)), _ty((0, 1, 2), (1, 1, 1)), Fraction(10, 3)),
    ("d3", _tensor(3, (1, 1, 1), (1, 3, 3)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d4", _tensor(3, (1, 1, 1), (3, 1, 3)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d5", _tensor(3, (1, 1, 1), (1, 3, 3), (3, 1, 3)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d6", _tensor(3, (1, 1, 1), (3, 3, 3)), _ty((0, 1), (2, 1)), Fraction(2)),
    ("d7", _tensor(3, (1, 1, 1), (2, 1, 2), (1, 3, 3)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d8", _tensor(3, (1, 1, 1), (2, 1, 2), (3, 1, 3)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d9", _tensor(3, (1, 1, 1), (2, 1, 2), (1, 3, 3), (3, 1, 3)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d10", _tensor(3, (1, 1, 1), (2, 1, 2), (3, 3, 3)), _ty((0, 1), (2, 1)), Fraction(2)),
    ("d11", _tensor(3, (1, 1, 1), (2, 2, 2), (2, 3, 3)), _ty((0, 1), (2, 1)), Fraction(2)),
    ("d12", _tensor(3, (1, 1, 1), (2, 2, 2), (2, 3, 3), (3, 2, 3)), _ty((0, 1), (2, 1)), Fraction(2)),
    ("d13", _tensor(3, (1, 1, 1), (2, 2, 2), (2, 3, 3), (3, 1, 3)), _ty((0, 1), (2, 1)), Fraction(2)),
    ("d14", _tensor(3, (1, 1, 1), (2, 2, 2), (3, 3, 3)), _ty((0,), (3,)), Fraction(4, 3)),
    ("d15", _tensor(3, (1, 1, 2)), _ty((3, 5, 6), (1, 1, 1)), Fraction(20)),
    ("d16", _tensor(3, (1, 1, 2), (1, 2, 3), (2, 1, 3)), _ty((1, 2, 3), (1, 1, 1)), Fraction(28, 3)),
    ("d17", _tensor(3, (1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 1, 2), (1, 3, 3)),
     _ty((0, 1), (1, 2)), Fraction(4)),
    ("d18", _tensor(3, (1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 1, 2), (1, 3, 3), (3, 1, 3)),
     _ty((0, 1), (1, 2)), Fraction(4)),
    ("d19", _tensor(3, (3, 3, 3), (1, 1, 2), (1, 3, 1), (3, 1, 1), (2, 3, 2), (3, 2, 2)),
     _ty((0, 1, 2), (1, 1, 1)), Fraction(10, 3)),
    ("d20", _tensor(3, (1, 1, 1), (1, 2, 2), (1, 3, 3)), _ty((0, 1), (1, 2)), Fraction(4)),
    ("d21", _tensor(3, (1, 1, 3), (1, 2, 3), (2, 1, 3, -1.0)), None, None),
    ("d22", _tensor(3, (1, 2, 3), (2, 1, 3)), _ty((1, 2), (2, 1)), Fraction(12)),
]

# Alternative frames for the rows whose standard frame is not critical:
# U13 ~ d13 (upper triangular 2x2 matrices), W103 ~ d17, U03 ~ d18.
_MODELS: list[tuple[str, AlgebraTensor, CriticalType, Fraction]] = [
    ("U13",
     _tensor(3, (1, 1, 1), (3, 3, 1), (1, 2, 2), (2, 1, 2), (2, 3, 2), (1, 3, 3), (3, 1, 3),
             (3, 2, 2, -1.0)),
     _ty((0, 1), (2, 1)), Fraction(2)),
    ("W103",
     _tensor(3, (1, 2, 1), (2, 1, 1), (2, 2, 2), (2, 3, 3)),
     _ty((0, 1), (1, 2)), Fraction(4)),
    ("U03",
     _tensor(3, (1, 1, 1), (1, 2, 2), (2, 1, 2), (1, 3, 3), (3, 1, 3)),
     _ty((0, 1), (1, 2)), Fraction(4)),
]


def d22(x: complex, y: complex) -> AlgebraTensor:
    """Two-parameter family e1 e2 = x e3, e2 e1 = y e3 (nonzero (x, y))."""
    if x == 0 and y == 0:
        raise ValueError("d22 requires (x, y) != (0, 0)")
    return _tensor(3, (1, 2, 3, x), (2, 1, 3, y))


def mat_algebra(m: int) -> AlgebraTensor:
    """Full matrix algebra on the matrix-unit frame, dimension m^2.

    Basis e_{(i-1)m+j} = E_ij, so E_ij E_kl = delta_jk E_il.
    """
    if m < 1:
        raise ValueError("matrix size must be >= 1")
    n = m * m
    c = np.zeros((n, n, n), dtype=complex)
    for i in range(m):
        for j in range(m):
            for l in range(m):
                c[i * m + j, j * m + l, i * m + l] = 1.0
    return AlgebraTensor(n, c)


def mu_l(n: int) -> AlgebraTensor:
    """e1 acts as left unit: e1 e_i = e_i for all i."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return _tensor(n, *((1, i, i) for i in range(1, n + 1)))


def mu_r(n: int) -> AlgebraTensor:
    """e1 acts as right unit: e_i e1 = e_i for all i."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return _tensor(n, *((i, 1, i) for i in range(1, n + 1)))


def mu_ca(n: int) -> AlgebraTensor:
    """Commutative single-relation algebra e1 e1 = e2 in dimension n >= 2."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    return _tensor(n, (1, 1, 2))


def _entry_mat(m: int) -> CatalogEntry:
    return CatalogEntry(f"mat({m})", m * m, mat_algebra(m),
                        _ty((0,), (m * m,)), Fraction(4, m * m))


def _entry_mu_l(n: int) -> CatalogEntry:
    ty = _ty((0,), (1,)) if n == 1 else _ty((0, 1), (1, n - 1))
    return CatalogEntry(f"mu_l({n})", n, mu_l(n), ty, Fraction(4))


def _entry_mu_r(n: int) -> CatalogEntry:
    ty = _ty((0,), (1,)) if n == 1 else _ty((0, 1), (1, n - 1))
    return CatalogEntry(f"mu_r({n})", n, mu_r(n), ty, Fraction(4))


def _entry_mu_ca(n: int) -> CatalogEntry:
    ty = _ty((1, 2), (1, 1)) if n == 2 else _ty((3, 5, 6), (1, n - 2, 1))
    return CatalogEntry(f"mu_ca({n})", n, mu_ca(n), ty, Fraction(20))


_TABLES: dict[int, list[tuple[str, AlgebraTensor, CriticalType | None, Fraction | None]]] = {
    2: _DIM2,
    3: _DIM3,
}

_FAMILY = re.compile(r"^(mat|mu_l|mu_r|mu_ca)\((\d+)\)$")


def table_entries(dim: int) -> list[CatalogEntry]:
    """Classification-table rows for dim 2 or 3, in table order."""
    if dim not in _TABLES:
        raise KeyError(f"no classification table for dimension {dim}")
    return [CatalogEntry(name, dim, tensor, ty, value)
            for name, tensor, ty, value in _TABLES[dim]]


def model_entries() -> list[CatalogEntry]:
    return [CatalogEntry(name, 3, tensor, ty, value) for name, tensor, ty, value in _MODELS]


def catalog_get(name: str, dim: int | None = None) -> CatalogEntry:
    """Look up an entry by wire name.

    Table rows 'd1'...'d22' need `dim` (2 or 3); families are parametrized in
    the name ('mat(2)', 'mu_l(4)'); models are 'U13', 'W103', 'U03'.
    """
    name = name.strip()
    fam = _FAMILY.match(name)
    if fam:
        kind, arg = fam.group(1), int(fam.group(2))
        builder = {"mat": _entry_mat, "mu_l": _entry_mu_l, "mu_r": _entry_mu_r,
                   "mu_ca": _entry_mu_ca}[kind]
        return builder(arg)
    for model in model_entries():
        if model.name.lower() == name.lower():
            return model
    if re.fullmatch(r"d\d+", name):
        if dim is None:
            raise KeyError(f"entry {name!r} needs an explicit dimension (2 or 3)")
        for entry in table_entries(dim):
            if entry.name == name:
                return entry
        raise KeyError(f"no entry {name!r} in the dimension-{dim} table")
    raise KeyError(f"unknown catalog name {name!r}")


def catalog_names() -> list[str]:
    """All concrete entry names plus the family name patterns."""
    names = [f"{e.name} (dim 2)" for e in table_entries(2)]
    names += [f"{e.name} (dim 3)" for e in table_entries(3)]
    names += [e.name for e in model_entries()]
    names += ["mat(m)", "mu_l(n)", "mu_r(n)", "mu_ca(n)"]
    return names


def all_concrete_entries(max_mat: int = 3, family_dims: tuple[int, ...] = (2, 3, 4, 5)) -> list[CatalogEntry]:
    """Bounded enumeration of catalog entries used by the test harnesses."""
    entries = table_entries(2) + table_entries(3) + model_entries()
    entries += [_entry_mat(m) for m in range(1, max_mat + 1)]
    for n in family_dims:
        entries += [_entry_mu_l(n), _entry_mu_r(n)]
        if n >= 2:
            entries.append(_entry_mu_ca(n))
    return entries
