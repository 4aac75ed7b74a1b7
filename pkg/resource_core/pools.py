import logging
from collections import namedtuple
from functools import singledispatch
from operator import attrgetter

from sortedcontainers import SortedKeyList

from binding_glue.bindings import remove, unbind_snd

from .exceptions import (
    ConsumableResource,
    Exhausted,
    InvalidRegion,
    NoContiguousRun,
    SpanNotFree,
    SpanOutOfBounds,
    UniverseTooSmall,
    UnknownBinding,
)
from .regions import AddressSpace, Region, ResourceKind

logger = logging.getLogger(__name__)

# kind -> (reusable, finite)
KIND_TRAITS = {
    ResourceKind.MEMORY: (True, True),
    ResourceKind.VIRTUAL_MEMORY: (True, True),
    ResourceKind.NAMES: (True, True),
    ResourceKind.TIME: (False, False),
}

PoolState = namedtuple('PoolState', ['free', 'occupied', 'next_fresh'])


class ResourcePool:
    """An enumerated resource split into a free ledger and an occupied
    ledger.

    The free ledger is kept sorted by start address; the occupied ledger keeps
    append order. Infinite pools never materialize their elements: everything
    below ``next_fresh`` has been issued, everything above is implicitly free.
    """

    def __init__(self, kind, capacity=None):
        self.kind = kind
        self.reusable, self.finite = KIND_TRAITS[kind]
        if self.finite and (capacity is None or capacity < 1):
            raise InvalidRegion(f'{kind} pool needs a capacity >= 1')
        self.capacity = capacity if self.finite else None
        self.free_ledger = SortedKeyList(key=attrgetter('u_min'))
        self.occupied_ledger = []
        self.next_fresh = 0
        self.enumerated = False

    def __repr__(self):
        cap = self.capacity if self.finite else 'inf'
        return f'<ResourcePool {self.kind} cap={cap} free={self.free_total} used={self.occupied_total}>'

    @property
    def free_total(self):
        return sum(r.size for r in self.free_ledger)

    @property
    def occupied_total(self):
        return sum(r.size for r in self.occupied_ledger)

    def snapshot(self):
        return PoolState(tuple(self.free_ledger), frozenset(self.occupied_ledger), self.next_fresh)

    def take(self, region):
        """Move ``region`` from the free ledger to the occupied ledger."""
        if not self.finite:
            if region.u_min != self.next_fresh:
                raise SpanNotFree(f'{region} is not the next fresh span of {self.kind}')
            self.next_fresh = region.u_max + 1
            self.occupied_ledger.append(region)
            return region

        idx = self.free_ledger.bisect_key_right(region.u_min) - 1
        if idx < 0 or not self.free_ledger[idx].covers(region.u_min, region.u_max):
            raise SpanNotFree(f'{region} is not free in {self.kind}')
        run = self.free_ledger.pop(idx)
        if run.u_min < region.u_min:
            self.free_ledger.add(Region(self.kind, run.u_min, region.u_min - 1))
        if region.u_max < run.u_max:
            self.free_ledger.add(Region(self.kind, region.u_max + 1, run.u_max))
        self.occupied_ledger.append(region)
        logger.debug('%s: took %s', self.kind, region)
        return region

    def give_back(self, region):
        """Move ``region`` back to the free ledger, coalescing neighbours."""
        if not self.reusable:
            raise ConsumableResource(f'{self.kind} is consumable; {region} cannot be returned')
        try:
            self.occupied_ledger.remove(region)
        except ValueError:
            raise UnknownBinding(f'{region} is not occupied in {self.kind}') from None

        merged = region
        idx = self.free_ledger.bisect_key_left(region.u_min)
        if idx < len(self.free_ledger) and self.free_ledger[idx].u_min == region.u_max + 1:
            merged = Region(self.kind, merged.u_min, self.free_ledger.pop(idx).u_max)
        if idx > 0 and self.free_ledger[idx - 1].u_max == region.u_min - 1:
            merged = Region(self.kind, self.free_ledger.pop(idx - 1).u_min, merged.u_max)
        self.free_ledger.add(merged)
        logger.debug('%s: released %s (free run now %s)', self.kind, region, merged)


def memory_pool(capacity):
    return enumerate_pool(ResourcePool(ResourceKind.MEMORY, capacity))


def virtual_memory_pool(capacity):
    return enumerate_pool(ResourcePool(ResourceKind.VIRTUAL_MEMORY, capacity))


def time_pool():
    return enumerate_pool(ResourcePool(ResourceKind.TIME))


# ============================================
# UNIVERSAL OPERATIONS OVER POOLS
# ============================================

def enumerate_pool(pool, names=None):
    """Give every element of ``pool`` a natural address.

    ``names`` is the address universe; ``None`` means the naturals. Finite
    pools start out with a single free run [0..capacity-1]. Idempotent.
    """
    if pool.finite and names is not None and len(names) < pool.capacity:
        raise UniverseTooSmall(
            f'{len(names)} names cannot address {pool.capacity} elements of {pool.kind}'
        )
    if not pool.enumerated:
        if pool.finite:
            pool.free_ledger.add(Region(pool.kind, 0, pool.capacity - 1))
        pool.enumerated = True
    return pool


def make_set(pool, r):
    """Carve a contiguous subset of size ``r`` (first-fit, ascending address)."""
    if r < 1:
        raise InvalidRegion(f'cannot carve a subset of size {r}')
    enumerate_pool(pool)
    if not pool.finite:
        # consumable and infinite: the availability check is always true
        return pool.take(Region.of_size(pool.kind, pool.next_fresh, r))

    for run in pool.free_ledger:
        if run.size >= r:
            return pool.take(Region.of_size(pool.kind, run.u_min, r))

    free = pool.free_total
    if free >= r:
        raise NoContiguousRun(
            f'{pool.kind}: {free} units free but no contiguous run of {r}', requested=r, free=free
        )
    raise Exhausted(f'{pool.kind}: {r} units requested, {free} free', requested=r, free=free)


@singledispatch
def make_spec_set(source, u_min, u_max):
    """Return exactly the span [u_min..u_max] of ``source``.

    On a pool the span is moved to the occupied ledger. On a procedure's
    address space or on a region it is a pure slice; for regions the bounds
    are offsets from the region's start.
    """
    raise TypeError(f'make_spec_set does not apply to {type(source).__name__}')


@make_spec_set.register
def _(source: ResourcePool, u_min, u_max):
    if u_min < 0 or u_max < u_min:
        raise SpanOutOfBounds(f'bad span ({u_min}, {u_max})')
    enumerate_pool(source)
    if source.finite and u_max >= source.capacity:
        raise SpanOutOfBounds(f'span ({u_min}, {u_max}) outside {source.kind} of {source.capacity}')
    return source.take(Region(source.kind, u_min, u_max))


@make_spec_set.register
def _(source: AddressSpace, u_min, u_max):
    if u_min < 0 or u_max < u_min or u_max >= source.size:
        raise SpanOutOfBounds(f'span ({u_min}, {u_max}) outside {source.owner} of size {source.size}')
    return Region(ResourceKind.PROCEDURE, u_min, u_max)


@make_spec_set.register
def _(source: Region, u_min, u_max):
    return source.slice(u_min, u_max)


def release_set(pool, binding, table):
    """Unbind the region of ``binding``, return it to the free
    ledger and drop the binding. Returns the updated table."""
    if not pool.reusable:
        raise ConsumableResource(f'no release exists for consumable {pool.kind}')
    if binding not in table:
        raise UnknownBinding(f'{binding} is not in the binding table')
    pool.give_back(unbind_snd(binding).value)
    return remove(table, binding)
