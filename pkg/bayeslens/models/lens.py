"""Indexed families, chart objects, charts and lenses."""

import threading
from functools import lru_cache
from typing import Any, Callable, Dict, Hashable, Optional

from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator

from bayeslens.categories.markov import MarkovObject, Morphism, State, StateHandle, compose, instance_for
from bayeslens.core.config import settings
from bayeslens.core.errors import DomainMismatch, SignatureMismatch


class IndexedFamily(BaseModel):
    """Assignment of an object to every state on ``base``, cached by fingerprint."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: MarkovObject
    assign: Callable[[Morphism], MarkovObject]
    constant: Optional[MarkovObject] = None
    key: Optional[Callable[[Morphism], Hashable]] = None

    _cache: Dict[Hashable, MarkovObject] = PrivateAttr(default_factory=dict)
    _lock: Any = PrivateAttr(default_factory=threading.Lock)

    @classmethod
    def constant_family(cls, base: MarkovObject, obj: MarkovObject) -> "IndexedFamily":
        return cls(base=base, assign=lambda _pi: obj, constant=obj)

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    def at(self, pi: State) -> MarkovObject:
        if not pi.is_state or pi.cod != self.base:
            raise DomainMismatch(f"family over {self.base!r} evaluated at a morphism {pi.dom!r} -> {pi.cod!r}")
        if self.constant is not None:
            return self.constant
        key = self.key_of(pi)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        obj = self.assign(pi)
        # identical keys give identical objects, so last write wins
        with self._lock:
            self._cache[key] = obj
        return obj

    def key_of(self, pi: State) -> Hashable:
        """Cache key of pi; the instance fingerprint unless the family overrides it."""
        if self.key is not None:
            return self.key(pi)
        return instance_for(pi.kind).fingerprint(pi)


def memoize_on_state(fn: Callable[[State], Morphism]) -> Callable[[State], Morphism]:
    """Wrap a per-state map in a bounded cache keyed by the exact state."""
    cached = lru_cache(maxsize=settings.STATE_CACHE_SIZE)(lambda handle: fn(handle.state))
    return lambda pi: cached(StateHandle(pi))


class ChartObject(BaseModel):
    """A base object together with a family over it."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    forward: MarkovObject
    fibre: IndexedFamily

    @model_validator(mode="after")
    def _check_base(self) -> "ChartObject":
        if self.fibre.base != self.forward:
            raise ValueError(f"fibre is indexed over {self.fibre.base!r}, not {self.forward!r}")
        return self


def _check_fwd(source: ChartObject, target: ChartObject, fwd: Morphism) -> None:
    if fwd.dom != source.forward or fwd.cod != target.forward:
        raise ValueError(
            f"forward map {fwd.dom!r} -> {fwd.cod!r} does not join {source.forward!r} and {target.forward!r}"
        )


class Chart(BaseModel):
    """Forward map f plus a fibre map A(pi) -> B(pi ⨟ f) for every state pi."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source: ChartObject
    target: ChartObject
    fwd: Morphism
    fibre_fwd: Callable[[Morphism], Morphism]

    @model_validator(mode="after")
    def _check_signature(self) -> "Chart":
        _check_fwd(self.source, self.target, self.fwd)
        return self

    def at(self, pi: State) -> Morphism:
        """Fibre map at pi, checked against both evaluated families."""
        m = self.fibre_fwd(pi)
        dom = self.source.fibre.at(pi)
        cod = self.target.fibre.at(compose(pi, self.fwd))
        if m.dom != dom or m.cod != cod:
            raise SignatureMismatch(f"fibre map {m.dom!r} -> {m.cod!r} should be {dom!r} -> {cod!r}")
        return m


class Lens(BaseModel):
    """Forward map f plus a backward map B(pi ⨟ f) -> A(pi) for every state pi."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source: ChartObject
    target: ChartObject
    fwd: Morphism
    bwd: Callable[[Morphism], Morphism]

    @model_validator(mode="after")
    def _check_signature(self) -> "Lens":
        _check_fwd(self.source, self.target, self.fwd)
        return self

    def at(self, pi: State) -> Morphism:
        """Backward map at pi, checked against both evaluated families."""
        m = self.bwd(pi)
        dom = self.target.fibre.at(compose(pi, self.fwd))
        cod = self.source.fibre.at(pi)
        if m.dom != dom or m.cod != cod:
            raise SignatureMismatch(f"backward map {m.dom!r} -> {m.cod!r} should be {dom!r} -> {cod!r}")
        return m
