"""Sparse Haar orthonormal basis generated recursively over a coarse chain.

Construction follows the two-step recursion: an orthonormal system on the
coarsest level (constant vector plus nested difference vectors), then one
extension per level. Extending a vector copies the parent value to each
child scaled by 1/sqrt(cluster size); each cluster of size k additionally
contributes k-1 intra-cluster difference vectors. Column l of the result
belongs to band j when N_{j-1} < l <= N_j (N below the coarsest level is 0);
columns in band j are constant on the descendant sets of level-j vertices.

Columns are stored column-compressed; per-level associated bases are kept
alongside the finest basis because the fast transforms consume them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .chain import CoarseChain
from .errors import ParseError, ValidationError

# Values below this produced by construction are treated as structural zeros.
ZERO_EPS = 1e-14


def _cluster_column_data(k: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Local positions and values of the k-1 difference vectors on k points.

    Vector t (t = 2..k) has value sqrt((k-t+1)/(k-t+2)) at position t-2 and
    -1/sqrt((k-t+1)(k-t+2)) at positions t-1..k-1 (0-based); entries sum to
    zero and the vectors are orthonormal and orthogonal to the constant.
    """
    positions = []
    values = []
    for t in range(2, k + 1):
        r = k - t + 1
        a = np.sqrt(r / (r + 1.0))
        b = -1.0 / np.sqrt(r * (r + 1.0))
        pos = np.arange(t - 2, k, dtype=np.int64)
        val = np.full(k - t + 2, b, dtype=np.float64)
        val[0] = a
        positions.append(pos)
        values.append(val)
    return positions, values


def level_one_vectors(m: int) -> np.ndarray:
    """Dense (m, m) matrix whose columns are the orthonormal top-level vectors.

    Column 1 is the constant 1/sqrt(m); columns 2..m are the nested
    difference vectors of _cluster_column_data.
    """
    if m < 1:
        raise ValidationError(f"cluster count must be >= 1, got {m}")
    out = np.zeros((m, m), dtype=np.float64)
    out[:, 0] = 1.0 / np.sqrt(m)
    positions, values = _cluster_column_data(m)
    for c, (pos, val) in enumerate(zip(positions, values), start=1):
        out[pos, c] = val
    return out


def _sparse_from_dense(mat: np.ndarray) -> sp.csc_matrix:
    mat = np.where(np.abs(mat) < ZERO_EPS, 0.0, mat)
    out = sp.csc_matrix(mat)
    out.eliminate_zeros()
    out.sort_indices()
    return out


def _top_level_sparse(m: int) -> sp.csc_matrix:
    return _sparse_from_dense(level_one_vectors(m))


def _children_by_cluster(parent: np.ndarray, n_coarse: int) -> tuple[np.ndarray, np.ndarray]:
    """(indptr, children) with children ascending within clusters ascending."""
    counts = np.bincount(parent, minlength=n_coarse)
    indptr = np.zeros(n_coarse + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    children = np.argsort(parent, kind="stable").astype(np.int64)
    return indptr, children


def _intra_columns(parent: np.ndarray, n_fine: int, n_coarse: int) -> sp.csc_matrix:
    """Intra-cluster difference vectors for every cluster of size >= 2,
    grouped by ascending cluster id, shape (n_fine, n_fine - n_coarse)."""
    indptr, children = _children_by_cluster(parent, n_coarse)
    rows: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    colptr = [0]
    nnz = 0
    for u in range(n_coarse):
        ch = children[indptr[u]: indptr[u + 1]]
        k = len(ch)
        if k < 2:
            continue
        positions, values = _cluster_column_data(k)
        for pos, val in zip(positions, values):
            rows.append(ch[pos])
            vals.append(val)
            nnz += len(val)
            colptr.append(nnz)
    n_cols = n_fine - n_coarse
    if n_cols == 0:
        return sp.csc_matrix((n_fine, 0), dtype=np.float64)
    data = np.concatenate(vals)
    indices = np.concatenate(rows)
    mat = sp.csc_matrix((data, indices, np.asarray(colptr, dtype=np.int64)), shape=(n_fine, n_cols))
    mat.sort_indices()
    return mat


def _expansion_matrix(parent: np.ndarray, parent_wf: np.ndarray, n_fine: int, n_coarse: int) -> sp.csc_matrix:
    """E with E[v, parent(v)] = 1/sqrt(cluster size); extension is E @ basis."""
    data = parent_wf[parent]
    rows = np.arange(n_fine, dtype=np.int64)
    return sp.csc_matrix((data, (rows, parent)), shape=(n_fine, n_coarse))


def extend_one_level(parent_basis: sp.csc_matrix, chain: CoarseChain, j: int) -> sp.csc_matrix:
    """Extend the orthonormal basis at level j-1 to level j.

    Extended vectors come first in parent order, then the intra-cluster
    vectors grouped by cluster in ascending cluster-id order.
    """
    if not (chain.j0 < j <= chain.j):
        raise ValidationError(f"level {j} is not an extendable level of the chain")
    lvl = chain.level(j)
    coarse = chain.level(j - 1)
    if parent_basis.shape != (coarse.n, coarse.n):
        raise ValidationError(
            f"parent basis shape {parent_basis.shape} does not match level {j - 1} size {coarse.n}"
        )
    e = _expansion_matrix(lvl.parent, coarse.weight_factor, lvl.n, coarse.n)
    extended = (e @ parent_basis).tocsc()
    intra = _intra_columns(lvl.parent, lvl.n, coarse.n)
    out = sp.hstack([extended, intra], format="csc")
    out.sort_indices()
    return out


@dataclass
class SparseColumn:
    """One basis column: sorted nonzero (index, value) pairs and its band level."""

    indices: np.ndarray
    values: np.ndarray
    band: int


@dataclass
class HaarBasis:
    """Haar basis for a chain: finest columns plus per-level associated bases.

    band_offsets[i] = N_{j0+i}; columns l with band_offsets[i-1] < l <=
    band_offsets[i] (1-based) form band j0+i. per_level[i] is the full
    orthonormal basis at level j0+i; the finest basis is per_level[-1].
    """

    n: int
    j0: int
    j: int
    band_offsets: np.ndarray
    per_level: tuple[sp.csc_matrix, ...]
    _band_t: tuple[sp.csr_matrix, ...] = field(repr=False, default=())
    _dense: np.ndarray | None = field(repr=False, default=None)

    @property
    def columns(self) -> sp.csc_matrix:
        return self.per_level[-1]

    @property
    def nnz(self) -> int:
        return int(self.columns.nnz)

    @property
    def num_bands(self) -> int:
        return len(self.band_offsets)

    def band_of(self, ell: int) -> int:
        """Chain level of 1-based column ell."""
        if not (1 <= ell <= self.n):
            raise ValidationError(f"column index {ell} outside 1..{self.n}")
        return self.j0 + int(np.searchsorted(self.band_offsets, ell, side="left"))

    def band_transposed(self, i: int) -> sp.csr_matrix:
        """Rows are the band-(j0+i) columns restricted to level j0+i vertices."""
        return self._band_t[i]

    def column(self, ell: int) -> SparseColumn:
        band = self.band_of(ell)
        col = self.columns[:, ell - 1].tocoo()
        order = np.argsort(col.row)
        return SparseColumn(indices=col.row[order], values=col.data[order], band=band)

    def dense(self) -> np.ndarray:
        """Dense finest-basis matrix, built once and cached (oracle/baseline)."""
        if self._dense is None:
            self._dense = self.columns.toarray()
        return self._dense


def build_haar_basis(chain: CoarseChain) -> HaarBasis:
    """Generate the per-level bases by the two-step recursion."""
    sizes = chain.level_sizes
    per_level = [_top_level_sparse(sizes[0])]
    for i in range(1, chain.num_levels):
        per_level.append(extend_one_level(per_level[i - 1], chain, chain.j0 + i))
    offsets = np.asarray(sizes, dtype=np.int64)
    band_t = []
    for i, mat in enumerate(per_level):
        lo = 0 if i == 0 else sizes[i - 1]
        band_t.append(mat[:, lo: sizes[i]].T.tocsr())
    return HaarBasis(
        n=chain.n,
        j0=chain.j0,
        j=chain.j,
        band_offsets=offsets,
        per_level=tuple(per_level),
        _band_t=tuple(band_t),
    )


def sparsity(basis: HaarBasis) -> float:
    """Fraction of zero entries of the finest basis: 1 - nnz/N^2."""
    return 1.0 - basis.nnz / float(basis.n) ** 2


def column_support(basis: HaarBasis, ell: int) -> np.ndarray:
    """Sorted vertex ids where 1-based column ell is nonzero."""
    return basis.column(ell).indices


def distinct_value_counts(basis: HaarBasis) -> np.ndarray:
    """Number of distinct values per column, counting 0 when support < N.

    Reported (not asserted) for general chains; balanced-dyadic chains give
    at most three distinct values per column.
    """
    mat = basis.columns
    out = np.empty(basis.n, dtype=np.int64)
    for c in range(basis.n):
        vals = mat.data[mat.indptr[c]: mat.indptr[c + 1]]
        distinct = len(np.unique(vals))
        if len(vals) < basis.n:
            distinct += 1
        out[c] = distinct
    return out


def basis_to_json(basis: HaarBasis, stats: bool = False) -> str:
    """Serialize the finest basis: n, band sizes, and per-column entries.

    Floats go through repr (shortest exact round-trip at double precision).
    """
    mat = basis.columns
    cols = []
    for c in range(basis.n):
        lo, hi = mat.indptr[c], mat.indptr[c + 1]
        entries = [[int(i), float(v)] for i, v in zip(mat.indices[lo:hi], mat.data[lo:hi])]
        cols.append({"band": basis.band_of(c + 1), "entries": entries})
    doc: dict = {"n": basis.n, "bands": [int(b) for b in basis.band_offsets], "columns": cols}
    if stats:
        doc["stats"] = {"sparsity": sparsity(basis), "nnz": basis.nnz}
    return json.dumps(doc, separators=(",", ":"))


@dataclass(frozen=True)
class LoadedBasis:
    """Finest-basis content of a basis file (no per-level data)."""

    n: int
    band_offsets: np.ndarray
    matrix: sp.csc_matrix


def basis_from_json(text: str) -> LoadedBasis:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"basis JSON: {exc}") from None
    try:
        n = int(doc["n"])
        bands = np.asarray(doc["bands"], dtype=np.int64)
        cols = doc["columns"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"basis JSON missing or malformed field: {exc}") from None
    if len(cols) != n or (len(bands) and bands[-1] != n):
        raise ValidationError("basis JSON: column count and band offsets must end at n")
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for c, rec in enumerate(cols):
        entries = rec.get("entries")
        if entries is None:
            raise ParseError(f"basis JSON: column {c + 1} missing entries")
        prev = -1
        for entry in entries:
            try:
                idx, val = int(entry[0]), float(entry[1])
            except (TypeError, ValueError, IndexError):
                raise ParseError(f"basis JSON: column {c + 1} has a malformed entry") from None
            if not (prev < idx < n):
                raise ValidationError(f"basis JSON: column {c + 1} indices not strictly increasing in range")
            prev = idx
            indices.append(idx)
            data.append(float(val))
        indptr.append(len(indices))
    mat = sp.csc_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(n, n),
    )
    return LoadedBasis(n=n, band_offsets=bands, matrix=mat)


def basis_matches(loaded: LoadedBasis, basis: HaarBasis) -> bool:
    """Exact structural and value equality of a basis file vs a built basis."""
    if loaded.n != basis.n or not np.array_equal(loaded.band_offsets, basis.band_offsets):
        return False
    a, b = loaded.matrix, basis.columns
    return (
        np.array_equal(a.indptr, b.indptr)
        and np.array_equal(a.indices, b.indices)
        and np.array_equal(a.data, b.data)
    )


def save_basis(path: str | Path, basis: HaarBasis, stats: bool = False) -> None:
    Path(path).write_text(basis_to_json(basis, stats=stats) + "\n", encoding="utf-8")


def load_basis(path: str | Path) -> LoadedBasis:
    return basis_from_json(Path(path).read_text(encoding="utf-8"))
