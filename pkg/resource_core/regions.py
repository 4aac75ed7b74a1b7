from dataclasses import dataclass
from enum import Enum

from .exceptions import InvalidRegion, SpanOutOfBounds


class ResourceKind(Enum):
    MEMORY = 'mem'
    VIRTUAL_MEMORY = 'vmem'
    TIME = 'time'
    NAMES = 'names'
    # offsets inside a procedure's own address space, never a pool
    PROCEDURE = 'proc'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Region:
    """A contiguous span [u_min..u_max] of some enumerated set.

    Called an *interval* when the kind is TIME.
    """

    pool_kind: ResourceKind
    u_min: int
    u_max: int

    def __post_init__(self):
        if self.u_min < 0 or self.u_max < self.u_min:
            raise InvalidRegion(f'bad span [{self.u_min}..{self.u_max}]')

    @property
    def size(self):
        return self.u_max - self.u_min + 1

    def __contains__(self, address):
        return self.u_min <= address <= self.u_max

    def __str__(self):
        return f'[{self.u_min}..{self.u_max}]'

    def covers(self, u_min, u_max):
        return self.u_min <= u_min and u_max <= self.u_max

    def overlaps(self, other):
        return self.u_min <= other.u_max and other.u_min <= self.u_max

    def offset_of(self, address):
        return address - self.u_min

    def slice(self, lo, hi):
        """Sub-span by offsets relative to ``u_min``."""
        if lo < 0 or hi < lo or hi >= self.size:
            raise SpanOutOfBounds(f'offsets {lo}..{hi} outside {self} (size {self.size})')
        return Region(self.pool_kind, self.u_min + lo, self.u_min + hi)

    @classmethod
    def of_size(cls, kind, start, size):
        return cls(kind, start, start + size - 1)


@dataclass(frozen=True)
class AddressSpace:
    """The set of naturals 0..size-1 making up a procedure."""

    owner: str
    size: int
