"""Weighted undirected graphs, vertex signals, and dense comparison operators.

A Graph stores each undirected edge once with a positive weight; vertex ids
are dense 0..n-1 and self-loops are rejected at ingestion (the smoothing
matrix reintroduces them internally). Signals are plain 1-D float arrays of
length n, feature matrices 2-D float arrays with one row per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph: n vertices, canonical merged edge list.

    Edges are stored as parallel arrays (u < v, ascending lexicographic
    order) so that identical inputs produce bit-identical graphs.
    """

    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray

    @property
    def num_edges(self) -> int:
        return len(self.edge_u)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (int(u), int(v), float(w))
            for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w)
        ]

    def degrees(self) -> np.ndarray:
        """Unweighted degree (neighbor count) per vertex."""
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.edge_u, 1)
        np.add.at(deg, self.edge_v, 1)
        return deg

    def weighted_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.float64)
        np.add.at(deg, self.edge_u, self.edge_w)
        np.add.at(deg, self.edge_v, self.edge_w)
        return deg

    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency matrix."""
        a = np.zeros((self.n, self.n), dtype=np.float64)
        a[self.edge_u, self.edge_v] = self.edge_w
        a[self.edge_v, self.edge_u] = self.edge_w
        return a

    def neighbor_lists(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style (indptr, neighbor ids, edge weights), neighbors by ascending id."""
        deg = self.degrees()
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        nbr = np.empty(indptr[-1], dtype=np.int64)
        wts = np.empty(indptr[-1], dtype=np.float64)
        cursor = indptr[:-1].copy()
        # both directions of every stored edge
        for a, b, w in zip(self.edge_u, self.edge_v, self.edge_w):
            nbr[cursor[a]] = b
            wts[cursor[a]] = w
            cursor[a] += 1
            nbr[cursor[b]] = a
            wts[cursor[b]] = w
            cursor[b] += 1
        for i in range(self.n):
            lo, hi = indptr[i], indptr[i + 1]
            order = np.argsort(nbr[lo:hi], kind="stable")
            nbr[lo:hi] = nbr[lo:hi][order]
            wts[lo:hi] = wts[lo:hi][order]
        return indptr, nbr, wts


def make_graph(n: int, edges) -> Graph:
    """Build a Graph from (u, v, w) triples, merging duplicates by weight sum.

    Raises ValidationError for self-loops, out-of-range ids, or weights <= 0.
    """
    if n < 0:
        raise ValidationError(f"vertex count must be >= 0, got {n}")
    merged: dict[tuple[int, int], float] = {}
    for u, v, w in edges:
        u, v, w = int(u), int(v), float(w)
        if u == v:
            raise ValidationError(f"self-loop on vertex {u} is not allowed")
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u},{v}) references vertex outside 0..{n - 1}")
        if not (w > 0.0) or not np.isfinite(w):
            raise ValidationError(f"edge ({u},{v}) has non-positive or non-finite weight {w}")
        key = (u, v) if u < v else (v, u)
        merged[key] = merged.get(key, 0.0) + w
    keys = sorted(merged)
    eu = np.array([k[0] for k in keys], dtype=np.int64)
    ev = np.array([k[1] for k in keys], dtype=np.int64)
    ew = np.array([merged[k] for k in keys], dtype=np.float64)
    return Graph(n=n, edge_u=eu, edge_v=ev, edge_w=ew)


def load_edge_list(path: str | Path) -> Graph:
    """Parse a whitespace-separated edge list file into a Graph.

    Each non-comment line is "u v [w]" with 0-based ids; a missing weight
    defaults to 1.0. Duplicate undirected edges merge by summing weights.
    Lines starting with '#' are comments except the header "#n <int>",
    which overrides the vertex count (otherwise n = 1 + max id).
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    n_override = None
    triples: list[tuple[int, int, float]] = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "n":
                if len(parts) != 2:
                    raise ParseError(f"{path}:{lineno}: malformed header {line!r}")
                try:
                    n_override = int(parts[1])
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: header count {parts[1]!r} is not an integer") from None
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ParseError(f"{path}:{lineno}: expected 'u v [w]', got {line!r}")
        try:
            u = int(fields[0])
            v = int(fields[1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: vertex ids must be integers in {line!r}") from None
        if u < 0 or v < 0:
            raise ValidationError(f"{path}:{lineno}: negative vertex id in {line!r}")
        if u == v:
            raise ValidationError(f"{path}:{lineno}: self-loop on vertex {u}")
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: weight {fields[2]!r} is not a number") from None
        else:
            w = 1.0
        if not (w > 0.0) or not np.isfinite(w):
            raise ValidationError(f"{path}:{lineno}: weight must be positive and finite, got {w}")
        triples.append((u, v, w))
        max_id = max(max_id, u, v)
    n = max_id + 1
    if n_override is not None:
        if n_override < n:
            raise ValidationError(
                f"{path}: header '#n {n_override}' is smaller than 1 + max vertex id ({n})"
            )
        n = n_override
    return make_graph(n, triples)


def load_matrix_csv(path: str | Path) -> np.ndarray:
    """Load a rectangular numeric CSV into an (n, d) float array.

    One row per vertex. Ragged rows and non-numeric fields raise ParseError
    with the offending row/column; non-finite values raise ValidationError.
    """
    path = Path(path)
    rows: list[list[float]] = []
    width = None
    with path.open(encoding="utf-8") as fh:
        for rowno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(
                    f"{path}:{rowno}: ragged row, expected {width} fields, got {len(fields)}"
                )
            parsed = []
            for colno, f in enumerate(fields, start=1):
                try:
                    parsed.append(float(f))
                except ValueError:
                    raise ParseError(
                        f"{path}: row {rowno}, col {colno}: {f.strip()!r} is not a number"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: empty matrix file")
    mat = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(mat)):
        raise ValidationError(f"{path}: matrix contains non-finite entries")
    return mat


def save_matrix_csv(path: str | Path, mat: np.ndarray) -> None:
    """Write a vector or matrix as CSV, repr floats (exact round-trip)."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.float64))
    if mat.shape[0] == 1 and mat.size > 1:
        mat = mat.T
    lines = [",".join(repr(float(x)) for x in row) for row in mat]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_signal_csv(path: str | Path) -> np.ndarray:
    """Load a single-column CSV as a 1-D signal."""
    mat = load_matrix_csv(path)
    if mat.shape[1] != 1:
        raise ValidationError(f"{path}: expected a single column, got {mat.shape[1]}")
    return mat[:, 0]


def laplacian(g: Graph, normalized: bool = False) -> np.ndarray:
    """Graph Laplacian: L = D - A, or I - D^(-1/2) A D^(-1/2) if normalized.

    Isolated vertices contribute a zero row/column (unnormalized) or a
    diagonal 1 (normalized).
    """
    if g.n < 1:
        raise ValidationError("laplacian requires at least one vertex")
    a = g.adjacency()
    d = g.weighted_degrees()
    if not normalized:
        return np.diag(d) - a
    with np.errstate(divide="ignore"):
        dinv = np.where(d > 0, 1.0 / np.sqrt(d), 0.0)
    # outer product first keeps the result bitwise symmetric
    return np.eye(g.n) - a * np.outer(dinv, dinv)


def smoothing_matrix(g: Graph) -> np.ndarray:
    """GCN-style smoothing operator D~^(-1/2) (A + I) D~^(-1/2).

    D~ is the degree matrix of A + I, so every vertex has degree >= 1 and
    the result is symmetric with entries in [0, 1].
    """
    if g.n < 1:
        raise ValidationError("smoothing_matrix requires at least one vertex")
    a = g.adjacency() + np.eye(g.n)
    d = a.sum(axis=1)
    dinv = 1.0 / np.sqrt(d)
    return a * np.outer(dinv, dinv)
