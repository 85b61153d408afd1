"""Pretrained word/entity vectors with cosine lookups."""

import logging
from pathlib import Path

import numpy as np

from chatrank.errors import DataError

log = logging.getLogger(__name__)


class EmbeddingStore:
    """Dense vectors keyed by surface term or entity id. Read-only after construction."""

    def __init__(self, vectors, dimension=None):
        keys = list(vectors)
        if dimension is None:
            if not keys:
                raise DataError("cannot infer dimension of an empty store")
            dimension = len(vectors[keys[0]])
        if dimension <= 0:
            raise DataError("dimension must be positive")
        self.dimension = int(dimension)
        self.keys = keys
        self.index = {k: i for i, k in enumerate(keys)}
        self.matrix = np.zeros((len(keys), self.dimension), dtype=np.float64)
        for i, k in enumerate(keys):
            row = np.asarray(vectors[k], dtype=np.float64)
            if row.shape != (self.dimension,):
                raise DataError(f"vector for {k!r} has {row.size} components, expected {self.dimension}")
            self.matrix[i] = row
        self.norms = np.sqrt(np.einsum("ij,ij->i", self.matrix, self.matrix))
        # zero-norm rows stay zero so they are similar to nothing
        self.unit = np.divide(self.matrix, self.norms[:, None], out=np.zeros_like(self.matrix),
                              where=self.norms[:, None] > 0)
        for arr in (self.matrix, self.norms, self.unit):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.keys)

    def __contains__(self, key):
        return key in self.index

    def vector(self, key):
        return self.matrix[self.index[key]]

    def cosine(self, a, b):
        """Cosine of two stored vectors, or ``None`` if either key is unknown."""
        ia = self.index.get(a)
        ib = self.index.get(b)
        if ia is None or ib is None:
            return None
        if a == b:
            return 1.0 if self.norms[ia] > 0 else 0.0
        return _cos(self.matrix[ia], self.norms[ia], self.matrix[ib], self.norms[ib])

    def similarity(self, a, b):
        """Like ``cosine`` but unknown keys score 0."""
        sim = self.cosine(a, b)
        return 0.0 if sim is None else sim

    def cosine_to(self, vec, keys=None):
        """Cosine of ``vec`` against ``keys`` (all keys by default), as an array."""
        vec = np.asarray(vec, dtype=np.float64)
        idx = np.arange(len(self.keys)) if keys is None else np.array([self.index[k] for k in keys], dtype=int)
        vnorm = float(np.sqrt(vec @ vec))
        sims = np.zeros(len(idx))
        if vnorm == 0 or len(idx) == 0:
            return sims
        norms = self.norms[idx]
        ok = norms > 0
        sims[ok] = (self.matrix[idx[ok]] @ vec) / (norms[ok] * vnorm)
        return np.clip(sims, -1.0, 1.0)

    def neighbors_above(self, w, tau, candidates):
        """Candidates with cosine >= ``tau`` to ``w``, most similar first.

        ``w`` itself counts with similarity 1.0 when it is a candidate.
        Candidates missing from the store are skipped.
        """
        if not -1.0 <= tau <= 1.0:
            raise ValueError("tau must lie in [-1, 1]")
        if w not in self.index:
            return []
        out = []
        for c in set(candidates):
            sim = self.cosine(w, c)
            if sim is not None and sim >= tau:
                out.append((c, sim))
        out.sort(key=lambda kv: (-kv[1], kv[0]))
        return out


def _cos(a, na, b, nb):
    if na == 0 or nb == 0:
        return 0.0
    sim = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, sim))


def load_embeddings(path):
    """Read the text vector format: ``<count> <dim>`` header, then ``key v1 .. vdim`` rows.

    Keys must not contain whitespace. A repeated key keeps the last row.
    """
    path = Path(path)
    vectors = {}
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataError(f"{path}:1: expected '<count> <dimension>' header")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise DataError(f"{path}:1: non-integer header") from exc
        if dim <= 0:
            raise DataError(f"{path}:1: dimension must be positive")
        rows = 0
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            rows += 1
            key, values = parts[0], parts[1:]
            if len(values) != dim:
                raise DataError(f"{path}:{lineno}: row {key!r} has {len(values)} components, expected {dim}")
            try:
                vec = [float(v) for v in values]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: row {key!r} has a non-numeric component") from exc
            if key in vectors:
                log.warning("%s:%d: duplicate key %r, keeping the last row", path, lineno, key)
                del vectors[key]
            vectors[key] = vec
    if rows != count:
        log.warning("%s: header announces %d rows, found %d", path, count, rows)
    return EmbeddingStore(vectors, dim)


def write_embeddings(store_or_vectors, path):
    if isinstance(store_or_vectors, EmbeddingStore):
        items = [(k, store_or_vectors.vector(k)) for k in store_or_vectors.keys]
        dim = store_or_vectors.dimension
    else:
        items = list(store_or_vectors.items())
        dim = len(items[0][1]) if items else 0
    lines = [f"{len(items)} {dim}"]
    lines += [k + " " + " ".join(repr(float(x)) for x in v) for k, v in items]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
