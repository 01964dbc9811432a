"""Correspondence analysis of a labeled non-negative table.

The table is normalized to the correspondence matrix P (counts divided by
the grand total), whose row and column sums are the masses a and b. The
decomposition is the SVD of the standardized residuals

    S = D_a^{-1/2} (P - a b^T) D_b^{-1/2} = U D_lambda V^T

Standard coordinates are the mass-rescaled singular vectors
(rows: D_a^{-1/2} U, columns: D_b^{-1/2} V); principal coordinates are
standard coordinates scaled by the singular values, so inter-point
Euclidean distances approximate chi-square distances. The total inertia
equals the chi-square statistic of the table divided by the grand total.

Supplementary profiles (here: yearly term profiles) are projected through
the row transition formula and never influence the axes.

Determinism: the SVD sign ambiguity is fixed per dimension by requiring
the column standard coordinate of largest absolute value to be positive
(ties broken by the lexicographically first column label), recorded as
sign convention ``colmax-positive-v1``. Two runs on the same input produce
identical output.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Literal, Sequence

import numpy as np
from scipy import sparse

from .corpus import Corpus
from .errors import DataError, LabelNotFoundError, ValidationError
from .textpipe import DocTermMatrix, WeightedMatrix, _read_text, _write_text

__all__ = [
    "SIGN_CONVENTION",
    "CaInput",
    "CaModel",
    "SupplementaryProjection",
    "compute_ca",
    "project_supplementary",
    "aggregate_year_profiles",
    "point_distance",
    "nearest_points",
    "write_coordinates_tsv",
    "write_model_json",
    "write_year_coords_tsv",
    "read_model_artifacts",
    "read_year_coords_tsv",
]

logger = logging.getLogger("lexevo.ca")

SIGN_CONVENTION = "colmax-positive-v1"

#: Singular values at or below this are treated as zero and dropped.
SV_EPS = 1e-12

PointKind = Literal["row", "col"]


@dataclass(frozen=True, eq=False)
class CaInput:
    """A labeled non-negative dense matrix ready for correspondence analysis."""

    matrix: np.ndarray
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    @classmethod
    def from_counts(cls, dtm: DocTermMatrix) -> "CaInput":
        return cls(dtm.counts.toarray().astype(np.float64), dtm.rows, dtm.terms)

    @classmethod
    def from_weighted(cls, wm: WeightedMatrix) -> "CaInput":
        return cls(wm.values.toarray().astype(np.float64), wm.rows, wm.terms)

    def validate(self) -> None:
        m = self.matrix
        if m.ndim != 2:
            raise ValidationError(f"matrix must be 2-d, got shape {m.shape}")
        if m.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValidationError(
                f"label count {(len(self.row_labels), len(self.col_labels))} "
                f"does not match matrix shape {m.shape}"
            )
        if not np.all(np.isfinite(m)):
            raise ValidationError("matrix contains non-finite entries")
        if (m < 0).any():
            bad = np.argwhere(m < 0)[:5].tolist()
            raise ValidationError(f"matrix has negative entries at {bad}")
        if m.sum() <= 0:
            raise ValidationError("matrix grand total must be positive")
        zero_rows = [self.row_labels[i] for i in np.flatnonzero(m.sum(axis=1) == 0)]
        zero_cols = [self.col_labels[j] for j in np.flatnonzero(m.sum(axis=0) == 0)]
        if zero_rows or zero_cols:
            raise ValidationError(
                f"matrix has all-zero rows {zero_rows} / columns {zero_cols}"
            )


@dataclass(frozen=True, eq=False)
class CaModel:
    """Fitted correspondence analysis.

    ``singular_values`` holds every non-trivial singular value (descending),
    so ``inertia_total`` equals their squared sum; coordinate matrices keep
    only the retained ``dims`` leading dimensions.
    """

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    row_masses: np.ndarray
    col_masses: np.ndarray
    singular_values: np.ndarray
    inertia_total: float
    inertia_shares: np.ndarray
    dims: int
    row_coords_standard: np.ndarray
    col_coords_standard: np.ndarray
    row_coords_principal: np.ndarray
    col_coords_principal: np.ndarray

    def labels(self, kind: PointKind) -> tuple[str, ...]:
        return self.row_labels if kind == "row" else self.col_labels

    def principal(self, kind: PointKind) -> np.ndarray:
        return (
            self.row_coords_principal if kind == "row" else self.col_coords_principal
        )


def _canonicalize_signs(
    u: np.ndarray, v: np.ndarray, col_std: np.ndarray, col_labels: Sequence[str]
) -> None:
    """Flip singular-vector pairs in place so that, per dimension, the
    column standard coordinate of largest magnitude is positive."""
    for k in range(u.shape[1]):
        col = col_std[:, k]
        magnitude = np.abs(col)
        peak = magnitude.max()
        candidates = np.flatnonzero(magnitude == peak)
        j = min(candidates, key=lambda i: col_labels[i])
        if col[j] < 0:
            u[:, k] *= -1.0
            v[:, k] *= -1.0
            col_std[:, k] *= -1.0


def compute_ca(inp: CaInput, dims: int = 2) -> CaModel:
    """Fit correspondence analysis and retain the top ``dims`` dimensions.

    ``dims`` must satisfy 1 <= dims <= min(rows, cols) - 1. Dimensions
    whose singular value does not exceed ``SV_EPS`` are dropped, so the
    retained count can be smaller than requested (zero for an independent
    table).
    """
    inp.validate()
    n_rows, n_cols = inp.matrix.shape
    max_dims = min(n_rows, n_cols) - 1
    if not 1 <= dims <= max_dims:
        raise ValidationError(
            f"dims must be between 1 and min(rows, cols) - 1 = {max_dims}, got {dims}"
        )

    p = inp.matrix / inp.matrix.sum()
    a = p.sum(axis=1)
    b = p.sum(axis=0)
    expected = np.outer(a, b)
    s = (p - expected) / np.sqrt(expected)

    u, sv, vt = np.linalg.svd(s, full_matrices=False)
    v = vt.T
    keep = sv > SV_EPS
    u, sv, v = u[:, keep], sv[keep], v[:, keep]

    col_std_full = v / np.sqrt(b)[:, None]
    _canonicalize_signs(u, v, col_std_full, inp.col_labels)
    row_std_full = u / np.sqrt(a)[:, None]

    inertia_total = float(np.sum(sv**2))
    shares = sv**2 / inertia_total if inertia_total > 0 else np.zeros_like(sv)

    k = min(dims, sv.size)
    row_std = row_std_full[:, :k]
    col_std = col_std_full[:, :k]
    return CaModel(
        row_labels=tuple(inp.row_labels),
        col_labels=tuple(inp.col_labels),
        row_masses=a,
        col_masses=b,
        singular_values=sv,
        inertia_total=inertia_total,
        inertia_shares=shares,
        dims=k,
        row_coords_standard=row_std,
        col_coords_standard=col_std,
        row_coords_principal=row_std * sv[:k],
        col_coords_principal=col_std * sv[:k],
    )


@dataclass(frozen=True, eq=False)
class SupplementaryProjection:
    """A profile projected into an existing solution without mass.

    ``profile`` is the normalized (sum 1) profile over the active columns;
    it is None for projections reloaded from disk artifacts.
    """

    label: str
    profile: np.ndarray | None
    coords: np.ndarray


def project_supplementary(
    model: CaModel, profile: Sequence[float] | np.ndarray, label: str
) -> SupplementaryProjection:
    """Project a column profile through the row transition formula.

    The profile is normalized to sum 1; its principal coordinate on
    dimension k is the profile-weighted average of the column standard
    coordinates. An active row's own profile reproduces that row's
    principal coordinates.
    """
    r = np.asarray(profile, dtype=np.float64)
    if r.ndim != 1 or r.size != len(model.col_labels):
        raise ValidationError(
            f"profile length {r.size} does not match {len(model.col_labels)} columns"
        )
    if (r < 0).any():
        raise ValidationError("profile entries must be non-negative")
    total = r.sum()
    if total <= 0:
        raise ValidationError("profile must have at least one positive entry")
    r = r / total
    return SupplementaryProjection(label, r, r @ model.col_coords_standard)


def aggregate_year_profiles(
    dtm: DocTermMatrix, corpus: Corpus
) -> list[tuple[int, np.ndarray]]:
    """Column-wise count sums per publication year, ascending by year.

    Every matrix row must map to a corpus document (consistency error
    otherwise). A year whose documents were all pruned from the matrix
    would have a zero profile; such years are omitted with a warning.
    """
    docs = corpus.by_id()
    counts = sparse.csr_matrix(dtm.counts)
    by_year: dict[int, np.ndarray] = {}
    for i, doc_id in enumerate(dtm.rows):
        doc = docs.get(doc_id)
        if doc is None:
            raise DataError(f"matrix row {doc_id!r} has no corpus document")
        row = np.asarray(counts.getrow(i).todense()).ravel().astype(np.float64)
        if doc.year in by_year:
            by_year[doc.year] += row
        else:
            by_year[doc.year] = row
    out: list[tuple[int, np.ndarray]] = []
    for year in sorted(by_year):
        profile = by_year[year]
        if profile.sum() <= 0:
            logger.warning("year %d has an all-zero profile; omitted", year)
            continue
        out.append((year, profile))
    return out


def _point_index(model: CaModel, kind: PointKind, label: str) -> int:
    labels = model.labels(kind)
    try:
        return labels.index(label)
    except ValueError:
        raise LabelNotFoundError(f"no {kind} point labeled {label!r}") from None


def point_distance(model: CaModel, kind: PointKind, label_a: str, label_b: str) -> float:
    """Euclidean distance between two same-side points in principal
    coordinates over the retained dimensions."""
    coords = model.principal(kind)
    ia = _point_index(model, kind, label_a)
    ib = _point_index(model, kind, label_b)
    return float(np.linalg.norm(coords[ia] - coords[ib]))


def nearest_points(
    model: CaModel,
    kind: PointKind,
    anchor: str | Sequence[float] | np.ndarray,
    k: int,
) -> list[tuple[str, float]]:
    """The ``k`` nearest points to an anchor (a label on the same side, or
    explicit principal coordinates), ascending by distance, ties broken
    lexicographically. A label anchor is its own nearest point."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    coords = model.principal(kind)
    if isinstance(anchor, str):
        target = coords[_point_index(model, kind, anchor)]
    else:
        target = np.asarray(anchor, dtype=np.float64)
        if target.shape != (model.dims,):
            raise ValidationError(
                f"anchor coordinates must have shape ({model.dims},), got {target.shape}"
            )
    labels = model.labels(kind)
    dists = np.linalg.norm(coords - target[None, :], axis=1)
    order = sorted(range(len(labels)), key=lambda i: (dists[i], labels[i]))
    return [(labels[i], float(dists[i])) for i in order[:k]]


# ---------------------------------------------------------------------------
# On-disk artifacts
# ---------------------------------------------------------------------------


def write_coordinates_tsv(model: CaModel, dest: str | Path | IO[str]) -> None:
    """Coordinate export: kind, label, mass, principal coordinates, then
    per-dimension contributions (mass * coord^2 / lambda^2)."""
    k = model.dims
    header = (
        ["kind", "label", "mass"]
        + [f"dim{d + 1}" for d in range(k)]
        + [f"contrib_dim{d + 1}" for d in range(k)]
    )
    lines = ["\t".join(header) + "\n"]
    lam2 = model.singular_values[:k] ** 2
    for kind in ("row", "col"):
        labels = model.labels(kind)
        coords = model.principal(kind)
        masses = model.row_masses if kind == "row" else model.col_masses
        for i, label in enumerate(labels):
            contribs = masses[i] * coords[i] ** 2 / lam2 if k else np.empty(0)
            cells = [kind, label, repr(float(masses[i]))]
            cells += [repr(float(c)) for c in coords[i]]
            cells += [repr(float(c)) for c in contribs]
            lines.append("\t".join(cells) + "\n")
    _write_text(dest, "".join(lines))


def write_model_json(model: CaModel, dest: str | Path | IO[str]) -> None:
    payload = {
        "sign_convention": SIGN_CONVENTION,
        "dims": model.dims,
        "singular_values": [float(v) for v in model.singular_values],
        "inertia_total": model.inertia_total,
        "inertia_shares": [float(v) for v in model.inertia_shares],
    }
    _write_text(dest, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_year_coords_tsv(
    projections: Sequence[SupplementaryProjection], dest: str | Path | IO[str]
) -> None:
    if projections:
        k = projections[0].coords.size
    else:
        k = 0
    header = ["label"] + [f"dim{d + 1}" for d in range(k)]
    lines = ["\t".join(header) + "\n"]
    for proj in projections:
        cells = [proj.label] + [repr(float(c)) for c in proj.coords]
        lines.append("\t".join(cells) + "\n")
    _write_text(dest, "".join(lines))


def read_model_artifacts(
    coords_src: str | Path | IO[str], model_src: str | Path | IO[str]
) -> CaModel:
    """Rebuild a CaModel from the coordinate TSV and the model JSON.

    Standard coordinates are recovered as principal / singular value, so
    the reloaded model is numerically identical to the one exported
    (coordinates are written with full round-trip precision).
    """
    meta = json.loads(_read_text(model_src))
    sv = np.asarray(meta["singular_values"], dtype=np.float64)
    k = int(meta["dims"])

    rows: dict[str, tuple[float, np.ndarray]] = {}
    cols: dict[str, tuple[float, np.ndarray]] = {}
    lines = _read_text(coords_src).splitlines()
    for line in lines[1:]:
        cells = line.split("\t")
        kind, label, mass = cells[0], cells[1], float(cells[2])
        coords = np.asarray([float(c) for c in cells[3 : 3 + k]])
        (rows if kind == "row" else cols)[label] = (mass, coords)

    row_labels = tuple(rows)
    col_labels = tuple(cols)
    row_masses = np.asarray([rows[r][0] for r in row_labels])
    col_masses = np.asarray([cols[c][0] for c in col_labels])
    row_pri = np.vstack([rows[r][1] for r in row_labels]) if row_labels else np.empty((0, k))
    col_pri = np.vstack([cols[c][1] for c in col_labels]) if col_labels else np.empty((0, k))
    lam = sv[:k]
    return CaModel(
        row_labels=row_labels,
        col_labels=col_labels,
        row_masses=row_masses,
        col_masses=col_masses,
        singular_values=sv,
        inertia_total=float(meta["inertia_total"]),
        inertia_shares=np.asarray(meta["inertia_shares"], dtype=np.float64),
        dims=k,
        row_coords_standard=row_pri / lam if k else row_pri,
        col_coords_standard=col_pri / lam if k else col_pri,
        row_coords_principal=row_pri,
        col_coords_principal=col_pri,
    )


def read_year_coords_tsv(src: str | Path | IO[str]) -> list[SupplementaryProjection]:
    out: list[SupplementaryProjection] = []
    for line in _read_text(src).splitlines()[1:]:
        cells = line.split("\t")
        coords = np.asarray([float(c) for c in cells[1:]])
        out.append(SupplementaryProjection(cells[0], None, coords))
    return out
