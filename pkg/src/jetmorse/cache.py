"""On-disk cache of exact F_k, G_k polynomials.

Entries are JSON files keyed by (k, convention, engine).  The directory comes
from ``$JETMORSE_CACHE_DIR`` (default ``~/.cache/jetmorse``).  Writes go to a
temporary file that is renamed into place.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .chern import IntersectionForm
from .exact import MultiPoly

ENV_VAR = "JETMORSE_CACHE_DIR"
ENGINES = ("chern", "integral")


class CacheError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "jetmorse"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _digest(F: MultiPoly, G: MultiPoly) -> str:
    payload = _dumps({"F": F.to_json_obj(), "G": G.to_json_obj()})
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    k: int
    convention: str
    engine: str
    F: MultiPoly
    G: MultiPoly

    @property
    def content_hash(self) -> str:
        return _digest(self.F, self.G)

    @property
    def form(self) -> IntersectionForm:
        return IntersectionForm(self.k, self.F, self.G)

    def to_json_obj(self) -> dict:
        return {
            "k": self.k,
            "convention": self.convention,
            "engine": self.engine,
            "F": self.F.to_json_obj(),
            "G": self.G.to_json_obj(),
            "hash": self.content_hash,
        }

    def dumps(self) -> str:
        return _dumps(self.to_json_obj())

    @classmethod
    def loads(cls, text: str) -> CacheEntry:
        obj = json.loads(text)
        if obj.get("engine") not in ENGINES:
            raise CacheError(f"unknown engine {obj.get('engine')!r}")
        entry = cls(
            int(obj["k"]),
            obj["convention"],
            obj["engine"],
            MultiPoly.from_json_obj(obj["F"]),
            MultiPoly.from_json_obj(obj["G"]),
        )
        if obj.get("hash") != entry.content_hash:
            raise CacheError(f"hash mismatch in cache entry for k={entry.k} ({entry.engine})")
        return entry


def first_difference(p: MultiPoly, q: MultiPoly) -> str | None:
    if p.vars != q.vars:
        return f"contexts differ: {p.vars} vs {q.vars}"
    tp, tq = p.terms, q.terms
    for e in sorted(set(tp) | set(tq), reverse=True):
        if tp.get(e) != tq.get(e):
            mono = "*".join(f"{v}^{x}" for v, x in zip(p.vars, e) if x) or "1"
            return f"{mono}: {tp.get(e, 0)} vs {tq.get(e, 0)}"
    return None


class FGCache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, k: int, convention: str, engine: str) -> Path:
        return self.root / f"fg-k{k}-{convention}-{engine}.json"

    def store(self, entry: CacheEntry) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        target = self.path(entry.k, entry.convention, entry.engine)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(entry.dumps())
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return target

    def load(self, k: int, convention: str, engine: str) -> CacheEntry | None:
        """Load one entry; refuses if the other engine's entry disagrees."""
        p = self.path(k, convention, engine)
        if not p.exists():
            return None
        entry = CacheEntry.loads(p.read_text())
        other_name = ENGINES[1 - ENGINES.index(engine)]
        op = self.path(k, convention, other_name)
        if op.exists():
            other = CacheEntry.loads(op.read_text())
            for label, a, b in (("F", entry.F, other.F), ("G", entry.G, other.G)):
                diff = first_difference(a, b)
                if diff:
                    raise CacheError(
                        f"cached engines disagree for k={k} ({convention}) in {label}: {diff}"
                    )
        return entry
