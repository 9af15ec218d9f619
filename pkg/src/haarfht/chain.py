"""Coarse-grained chains: repeated graph coarsening plus derived weights.

A chain is a sequence of levels j = J0..J, coarsest first, where every
level-j vertex has exactly one parent at level j-1. The finest level J is
the input graph. Each level carries its child counts c_k (children at the
next finer level, 1 at level J) and weight factors w_k = 1/sqrt(c_k); the
fast transforms consume these plus the per-finest-vertex cumulative weight
table W_k^(j) = prod_{n=j}^{J-1} w^(n) over the ancestors of k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .graphs import Graph, make_graph


@dataclass(frozen=True)
class ChainLevel:
    """One chain level: vertex count, parent map, child counts, weight factors."""

    n: int
    parent: np.ndarray | None  # level-j vertex -> level-(j-1) parent; None at coarsest
    child_count: np.ndarray  # children at level j+1; all ones at the finest level
    weight_factor: np.ndarray  # 1/sqrt(child_count)


@dataclass(frozen=True)
class CoarseChain:
    """Chain of levels, index i <-> chain level j0 + i (coarsest first)."""

    levels: tuple[ChainLevel, ...]
    j0: int
    j: int  # finest level index; j - j0 + 1 == len(levels)

    @property
    def n(self) -> int:
        """Vertex count of the finest level."""
        return self.levels[-1].n

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    @property
    def level_sizes(self) -> list[int]:
        return [lvl.n for lvl in self.levels]

    def level(self, j: int) -> ChainLevel:
        if not (self.j0 <= j <= self.j):
            raise ValidationError(f"level {j} outside chain range {self.j0}..{self.j}")
        return self.levels[j - self.j0]


def coarsen_once(g: Graph, seed: int = 0) -> tuple[Graph, np.ndarray]:
    """One heavy-edge-matching coarsening step.

    Vertices are visited in descending-degree order (ties by ascending id)
    and matched with their unmatched neighbor of maximal edge weight (ties
    by ascending id). A leftover singleton with neighbors (all necessarily
    matched) is absorbed into the cluster of its heaviest neighbor; isolated
    vertices stay singletons. A graph with no edges at all pairs vertices
    (2i, 2i+1) in id order. The seed is accepted for interface uniformity;
    the rules above leave no randomness.

    Returns (coarser graph, parent map from fine vertex to cluster id).
    Guarantees coarser.n < g.n whenever g.n >= 2.
    """
    del seed
    if g.n < 1:
        raise ValidationError("coarsen_once requires at least one vertex")
    cluster_of = np.full(g.n, -1, dtype=np.int64)

    if g.num_edges == 0:
        for v in range(g.n):
            cluster_of[v] = v // 2
        n_coarse = (g.n + 1) // 2
        return make_graph(n_coarse, []), cluster_of

    deg = g.degrees()
    order = np.lexsort((np.arange(g.n), -deg))
    indptr, nbr, wts = g.neighbor_lists()

    next_id = 0
    for v in order:
        if cluster_of[v] != -1:
            continue
        best = -1
        best_w = 0.0
        for idx in range(indptr[v], indptr[v + 1]):
            u = nbr[idx]
            if cluster_of[u] == -1 and wts[idx] > best_w:
                best = u
                best_w = wts[idx]  # neighbors ascend by id, so strict > keeps lowest id on ties
        if best != -1:
            cluster_of[v] = next_id
            cluster_of[best] = next_id
            next_id += 1

    for v in order:
        if cluster_of[v] != -1:
            continue
        lo, hi = indptr[v], indptr[v + 1]
        if hi > lo:
            heavy = -1
            heavy_w = 0.0
            for idx in range(lo, hi):
                if wts[idx] > heavy_w:
                    heavy = nbr[idx]
                    heavy_w = wts[idx]
            cluster_of[v] = cluster_of[heavy]
        else:
            cluster_of[v] = next_id
            next_id += 1

    coarse_edges: dict[tuple[int, int], float] = {}
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        cu, cv = cluster_of[u], cluster_of[v]
        if cu == cv:
            continue
        key = (int(cu), int(cv)) if cu < cv else (int(cv), int(cu))
        coarse_edges[key] = coarse_edges.get(key, 0.0) + float(w)
    triples = [(u, v, w) for (u, v), w in sorted(coarse_edges.items())]
    return make_graph(next_id, triples), cluster_of


def _derive_levels(sizes: list[int], parents: list[np.ndarray | None]) -> tuple[ChainLevel, ...]:
    """Populate child counts and weight factors; validate parent maps."""
    levels = []
    num = len(sizes)
    for i in range(num):
        n_i = sizes[i]
        if n_i < 1:
            raise ValidationError(f"level {i} has no vertices")
        par = parents[i]
        if i == 0:
            if par is not None:
                raise ValidationError("coarsest level must not have a parent map")
        else:
            if par is None or len(par) != n_i:
                raise ValidationError(f"level {i} parent map must have length {n_i}")
            if n_i < sizes[i - 1]:
                raise ValidationError(f"level sizes must be non-decreasing, got {sizes}")
            if par.min() < 0 or par.max() >= sizes[i - 1]:
                raise ValidationError(f"level {i} parent ids outside 0..{sizes[i - 1] - 1}")
        if i + 1 < num:
            cc = np.bincount(parents[i + 1], minlength=n_i).astype(np.int64)
            if cc.min() < 1:
                raise ValidationError(f"level {i} has a vertex with no children")
        else:
            cc = np.ones(n_i, dtype=np.int64)
        levels.append(
            ChainLevel(
                n=n_i,
                parent=None if par is None else par.astype(np.int64),
                child_count=cc,
                weight_factor=1.0 / np.sqrt(cc.astype(np.float64)),
            )
        )
    return tuple(levels)


def chain_from_parent_maps(parents: list[np.ndarray], finest_n: int, j0: int = 0) -> CoarseChain:
    """Assemble a chain directly from parent maps ordered coarsest-to-finest.

    parents[i] maps level-(j0+i+1) vertices to level-(j0+i) parents; the
    coarsest size is inferred from the first map (or finest_n if no maps).
    """
    maps = [np.asarray(p, dtype=np.int64) for p in parents]
    if maps:
        if len(maps[-1]) != finest_n:
            raise ValidationError("finest parent map length must equal the finest vertex count")
        top_n = int(maps[0].max()) + 1 if maps[0].size else 1
        sizes = [top_n] + [len(m) for m in maps]
    else:
        sizes = [finest_n]
    levels = _derive_levels(sizes, [None] + maps)
    return CoarseChain(levels=levels, j0=j0, j=j0 + len(levels) - 1)


def build_chain(g: Graph, min_top: int = 1, seed: int = 42) -> CoarseChain:
    """Coarsen repeatedly until the top level has <= min_top vertices.

    Stops early if a step fails to shrink the graph (cannot happen for
    n >= 2, but keeps the loop total). Levels are recorded coarsest first.
    """
    if min_top < 1:
        raise ValidationError(f"min_top must be >= 1, got {min_top}")
    if g.n < 1:
        raise ValidationError("build_chain requires at least one vertex")
    graphs = [g]
    parent_maps: list[np.ndarray] = []
    top = g
    while top.n > min_top:
        coarser, pm = coarsen_once(top, seed)
        if coarser.n >= top.n:
            break
        graphs.append(coarser)
        parent_maps.append(pm)
        top = coarser
    sizes = [gr.n for gr in reversed(graphs)]
    parents: list[np.ndarray | None] = [None] + [pm for pm in reversed(parent_maps)]
    levels = _derive_levels(sizes, parents)
    return CoarseChain(levels=levels, j0=0, j=len(levels) - 1)


def finest_ancestors(chain: CoarseChain) -> list[np.ndarray]:
    """Per level, the level-j ancestor of every finest vertex (index j - j0)."""
    num = chain.num_levels
    anc = [np.empty(0, dtype=np.int64)] * num
    anc[num - 1] = np.arange(chain.n, dtype=np.int64)
    for i in range(num - 2, -1, -1):
        anc[i] = chain.levels[i + 1].parent[anc[i + 1]]
    return anc


def cumulative_weights(chain: CoarseChain) -> np.ndarray:
    """Table W of shape (N, num_levels): W[k, i] = prod of ancestor weight
    factors of finest vertex k from level j0+i up to J-1 (so W[:, -1] = 1).

    Computed in one sweep from level J-1 down to J0.
    """
    num = chain.num_levels
    n = chain.n
    anc = finest_ancestors(chain)
    table = np.empty((n, num), dtype=np.float64)
    table[:, num - 1] = 1.0
    for i in range(num - 2, -1, -1):
        table[:, i] = chain.levels[i].weight_factor[anc[i]] * table[:, i + 1]
    return table


@dataclass(frozen=True)
class FiltrationReport:
    """Per-level filtration check: every parent must have >= 2 children."""

    ok: bool
    per_level: tuple[bool, ...]  # levels j0..J-1
    offenders: tuple[tuple[int, int], ...]  # (level j, vertex k) with < 2 children


def validate_filtration(chain: CoarseChain) -> FiltrationReport:
    """Check whether the weighted chain is a filtration (vacuous if one level)."""
    per_level = []
    offenders = []
    for i in range(chain.num_levels - 1):
        cc = chain.levels[i].child_count
        good = bool(np.all(cc >= 2))
        per_level.append(good)
        if not good:
            for k in np.nonzero(cc < 2)[0]:
                offenders.append((chain.j0 + i, int(k)))
    return FiltrationReport(ok=all(per_level), per_level=tuple(per_level), offenders=tuple(offenders))


def chain_to_json(chain: CoarseChain) -> str:
    """Serialize: {"levels":[{"n":..,"parent":[..]},..],"J0":..,"J":..}.

    Weight factors and cumulative weights are derived data, recomputed on
    load, never serialized. Levels appear coarsest first (j = J0..J).
    """
    levels = []
    for lvl in chain.levels:
        rec: dict = {"n": int(lvl.n)}
        if lvl.parent is not None:
            rec["parent"] = [int(p) for p in lvl.parent]
        levels.append(rec)
    return json.dumps({"levels": levels, "J0": chain.j0, "J": chain.j}, separators=(",", ":"))


def chain_from_json(text: str) -> CoarseChain:
    """Parse and validate a serialized chain; derived fields are recomputed."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"chain JSON: {exc}") from None
    try:
        recs = doc["levels"]
        j0 = int(doc["J0"])
        j = int(doc["J"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"chain JSON missing or malformed field: {exc}") from None
    if not isinstance(recs, list) or not recs:
        raise ParseError("chain JSON: 'levels' must be a non-empty list")
    if j - j0 + 1 != len(recs):
        raise ValidationError(f"chain JSON: J - J0 + 1 = {j - j0 + 1} != {len(recs)} levels")
    sizes = []
    parents: list[np.ndarray | None] = []
    for i, rec in enumerate(recs):
        try:
            sizes.append(int(rec["n"]))
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"chain JSON: level {i} missing integer 'n'") from None
        if i == 0:
            if "parent" in rec:
                raise ValidationError("chain JSON: coarsest level must not carry a parent map")
            parents.append(None)
        else:
            if "parent" not in rec:
                raise ValidationError(f"chain JSON: level {i} missing parent map")
            try:
                parents.append(np.asarray(rec["parent"], dtype=np.int64))
            except (TypeError, ValueError):
                raise ParseError(f"chain JSON: level {i} parent map is not an integer array") from None
    levels = _derive_levels(sizes, parents)
    return CoarseChain(levels=levels, j0=j0, j=j)


def save_chain(path: str | Path, chain: CoarseChain) -> None:
    Path(path).write_text(chain_to_json(chain) + "\n", encoding="utf-8")


def load_chain(path: str | Path) -> CoarseChain:
    return chain_from_json(Path(path).read_text(encoding="utf-8"))
