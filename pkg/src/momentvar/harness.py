"""Classification-table harness and the d21 one-parameter obstruction.

Each table row is first tested on its catalog frame; rows that are not
critical there are resolved through a named recipe (a scaled direct sum of
critical blocks, or an isomorphic model that is critical on the standard
frame), so every row's provenance is explicit in the output.  d21 is the one
row expected to fail for every Hermitian metric: its derivation-part spectrum
follows a strict three-term polynomial law in the metric parameter and never
has the multiplicity pattern a critical point would need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import catalog
from .algebra import AlgebraTensor, act_group, direct_sum
from .catalog import CatalogEntry, table_entries
from .moment import CriticalReport, critical_test, format_type

VALUE_TOL = 1e-5


@dataclass(frozen=True)
class TableRow:
    name: str
    expected_type: str
    expected_value: float | None
    computed_type: str
    computed_value: float | None
    residual: float
    status: str  # match | mismatch | not-critical | degenerated
    provenance: str

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "expected_type": self.expected_type,
            "expected_value": self.expected_value,
            "computed_type": self.computed_type,
            "computed_value": self.computed_value,
            "residual": self.residual,
            "status": self.status,
            "provenance": self.provenance,
        }


def scaled_direct_sum(first: AlgebraTensor, second: AlgebraTensor) -> AlgebraTensor:
    """Critical model of a two-block algebra: rescale the second block so both
    blocks share the critical constant (an isomorphism of the direct sum)."""
    c1 = critical_test(first.normalized())
    c2 = critical_test(second.normalized())
    if not (c1.is_critical and c2.is_critical):
        raise ValueError("both blocks must be critical to build a scaled direct sum")
    t0 = math.sqrt(c1.c / c2.c)
    return direct_sum(first.normalized(), second.normalized(), t0)


def _unit_line() -> AlgebraTensor:
    return AlgebraTensor.from_terms(1, {(1, 1, 1): 1.0})


def _dim2(name: str) -> AlgebraTensor:
    return catalog.catalog_get(name, dim=2).tensor


# Rows of the dimension-3 table whose catalog frame is not critical, with the
# construction that is.
_RECIPES: dict[str, tuple[str, object]] = {
    "d2": ("scaled direct sum: [e1e1=e1] (+) t0 [e1e1=e2]",
           lambda: scaled_direct_sum(_unit_line(), catalog.mu_ca(2))),
    "d10": ("scaled direct sum: dim-2 d3 (+) t0 [e1e1=e1]",
            lambda: scaled_direct_sum(_dim2("d3"), _unit_line())),
    "d11": ("scaled direct sum: [e1e1=e1] (+) t0 dim-2 d2",
            lambda: scaled_direct_sum(_unit_line(), _dim2("d2"))),
    "d12": ("scaled direct sum: [e1e1=e1] (+) t0 dim-2 d6",
            lambda: scaled_direct_sum(_unit_line(), _dim2("d6"))),
    "d13": ("isomorphic model U13", lambda: catalog.catalog_get("U13").tensor),
    "d17": ("isomorphic model W103", lambda: catalog.catalog_get("W103").tensor),
    "d18": ("isomorphic model U03", lambda: catalog.catalog_get("U03").tensor),
    "d19": ("unit extension of [e1e1=e2] by the identity pair",
            lambda: _d19_semidirect()),
}


def _d19_semidirect() -> AlgebraTensor:
    from .structure import GammaPair, semidirect_sum
    lam = catalog.mu_ca(2)
    report = critical_test(lam)
    eye = np.eye(2, dtype=complex)
    built = semidirect_sum([GammaPair(eye, eye)], lam, report)
    # Constructed frame lists the nilpotent block first, then the new unit.
    return built


def _row_from_report(entry: CatalogEntry, report: CriticalReport | None,
                     provenance: str, direct_residual: float) -> TableRow:
    expected_type = format_type(*entry.expected_type) if entry.expected_type else "-"
    expected_value = float(entry.expected_value) if entry.expected_value is not None else None
    if report is None or not report.is_critical:
        computed_type = "-"
        computed_value = None
        residual = report.residual if report is not None else direct_residual
        status = "mismatch" if entry.expects_critical else "not-critical"
    else:
        computed_type = format_type(report.type_ks, report.type_ds)
        computed_value = report.value
        residual = report.residual
        if not entry.expects_critical:
            status = "mismatch"  # critical where the table says none exists
        elif (report.type_ks, report.type_ds) == entry.expected_type and \
                abs(report.value - expected_value) <= VALUE_TOL:
            status = "match"
        else:
            status = "mismatch"
    return TableRow(entry.name, expected_type, expected_value, computed_type,
                    computed_value, residual, status, provenance)


def run_table(dim: int, d22_samples: int = 2, seed: int = 7) -> list[TableRow]:
    """Reproduce the dimension-2 or dimension-3 classification table."""
    rows: list[TableRow] = []
    rng = np.random.default_rng(seed)
    for entry in table_entries(dim):
        direct = critical_test(entry.tensor)
        if not direct.is_critical and dim == 3 and entry.name in _RECIPES:
            provenance, builder = _RECIPES[entry.name]
            rows.append(_row_from_report(entry, critical_test(builder()), provenance,
                                         direct.residual))
        else:
            rows.append(_row_from_report(entry, direct, "catalog frame", direct.residual))
        if entry.name == "d22" and dim == 3:
            for _ in range(d22_samples):
                x, y = (complex(rng.uniform(0.5, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
                        for _ in range(2))
                sample = catalog.d22(x, y)
                sample_entry = CatalogEntry(
                    f"d22(x={x:.3g},y={y:.3g})", 3, sample,
                    entry.expected_type, entry.expected_value)
                rows.append(_row_from_report(sample_entry, critical_test(sample),
                                             "family sample", 0.0))
    return rows


def all_rows_as_expected(rows: list[TableRow]) -> bool:
    return all(row.status == ("match" if row.expected_type != "-" else "not-critical")
               for row in rows)


def format_table(rows: list[TableRow]) -> str:
    headers = ("name", "expected type", "value", "computed type", "value", "residual",
               "status", "provenance")
    data = [(r.name, r.expected_type,
             "-" if r.expected_value is None else f"{r.expected_value:.6g}",
             r.computed_type,
             "-" if r.computed_value is None else f"{r.computed_value:.6g}",
             f"{r.residual:.1e}", r.status, r.provenance) for r in rows]
    widths = [max(len(h), *(len(d[i]) for d in data)) for i, h in enumerate(headers)]
    lines = [" | ".join(h.ljust(w) for h, w in zip(headers, widths)),
             "-+-".join("-" * w for w in widths)]
    lines += [" | ".join(x.ljust(w) for x, w in zip(row, widths)) for row in data]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# The d21 family: no Hermitian metric is critical
# ---------------------------------------------------------------------------

def d21_spectrum_law(a: float) -> tuple[float, float, float]:
    """Predicted derivation-part spectrum direction for metric parameter a > 0."""
    s = a * a
    return (3 * s * s + 6 * s + 8, 5 * s * s + 10 * s + 8, 2 * (3 * s * s + 8 * s + 8))


def d21_family(samples: int = 10, a_max: float = 4.0, include: tuple[float, ...] = (1.0, 2.0)) -> list[dict]:
    """Sample metric pullbacks of d21 and verify the spectrum law.

    Each Hermitian metric on d21 is represented (up to scaling and
    automorphisms) by the frame diag(1/a, 1, 1); on that frame the
    derivation-part spectrum is proportional to d21_spectrum_law(a), whose
    three entries are distinct for every a > 0, so the type never has
    multiplicity pattern (2, 1) and d21 is never critical.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    d21 = catalog.catalog_get("d21", dim=3).tensor
    values = sorted(set(include) | set(np.geomspace(0.25, a_max, samples - len(include))
                                       if samples > len(include) else ()))
    out = []
    for a in values:
        pullback = act_group(np.diag([1.0 / a, 1.0, 1.0]), d21)
        report = critical_test(pullback)
        spectrum = np.sort(report.d_eigenvalues)
        predicted = np.array(d21_spectrum_law(a))
        ratios = spectrum / predicted
        scale = float(ratios.mean().real)
        max_rel_err = float(np.abs(ratios - scale).max() / abs(scale))
        gaps = np.diff(np.sort(spectrum / np.abs(spectrum).max()))
        out.append({
            "a": float(a),
            "spectrum": [float(x) for x in spectrum],
            "predicted_direction": [float(p) for p in predicted],
            "scale": scale,
            "max_rel_err": max_rel_err,
            "residual": report.residual,
            "critical": report.is_critical,
            "distinct_eigenvalues": bool(np.all(gaps > 1e-6)),
        })
    return out
