from collections import UserList
from dataclasses import dataclass
from enum import Enum

from .exceptions import IndexOutOfRange, InvalidRegion, MissingKey


class OrgVariant(Enum):
    IDENTITY = 'identity'
    CONSTANT_CHUNK = 'chunk'
    SORT_ASCENDING_BY_SIZE = 'size-asc'
    SORT_DESCENDING_BY_SIZE = 'size-desc'
    BY_EXTERNAL_KEY = 'key'


@dataclass(frozen=True)
class OrgSpec:
    variant: OrgVariant = OrgVariant.IDENTITY
    chunk_size: int = None
    key_name: str = None

    def __post_init__(self):
        if self.variant is OrgVariant.CONSTANT_CHUNK and (self.chunk_size is None or self.chunk_size < 1):
            raise InvalidRegion('ConstantChunk needs chunk_size >= 1')

    @classmethod
    def identity(cls):
        return cls(OrgVariant.IDENTITY)

    @classmethod
    def constant_chunk(cls, chunk_size):
        return cls(OrgVariant.CONSTANT_CHUNK, chunk_size=chunk_size)

    @classmethod
    def ascending(cls):
        return cls(OrgVariant.SORT_ASCENDING_BY_SIZE)

    @classmethod
    def descending(cls):
        return cls(OrgVariant.SORT_DESCENDING_BY_SIZE)

    @classmethod
    def by_key(cls, key_name):
        return cls(OrgVariant.BY_EXTERNAL_KEY, key_name=key_name)


class Organized(UserList):
    """An organized collection.

    ``boundaries`` holds the positions after which a chunk ends (ConstantChunk
    only); the last chunk's end is implied by the length.
    """

    def __init__(self, elements=(), boundaries=()):
        super().__init__(elements)
        self.boundaries = tuple(boundaries)

    def chunks(self):
        start = 0
        for end in self.boundaries + (len(self.data) - 1,):
            if start <= end:
                yield self.data[start:end + 1]
            start = end + 1


def organize(elements, spec, keys=None):
    """Rearrange ``elements`` according to ``spec``. Sorts are stable."""
    elements = list(elements)
    variant = spec.variant

    if variant is OrgVariant.IDENTITY:
        return Organized(elements)
    if variant is OrgVariant.SORT_ASCENDING_BY_SIZE:
        return Organized(sorted(elements, key=lambda e: e.size))
    if variant is OrgVariant.SORT_DESCENDING_BY_SIZE:
        # sorted(reverse=True) keeps ties in input order as well
        return Organized(sorted(elements, key=lambda e: e.size, reverse=True))
    if variant is OrgVariant.BY_EXTERNAL_KEY:
        keys = keys or {}
        for e in elements:
            if keys.get(e) is None:
                raise MissingKey(f'no {spec.key_name} key for {e}', element=e)
        return Organized(sorted(elements, key=lambda e: keys[e]))

    # CONSTANT_CHUNK: order unchanged, boundary every chunk_size elements
    n = spec.chunk_size
    boundaries = range(n - 1, len(elements) - 1, n)
    return Organized(elements, boundaries)


def select(collection, i):
    """Sel: the i-th member (1-based) of ``collection``."""
    if not 1 <= i <= len(collection):
        raise IndexOutOfRange(f'index {i} outside 1..{len(collection)}')
    return collection[i - 1]
