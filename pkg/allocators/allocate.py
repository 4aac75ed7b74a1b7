import logging

from binding_glue.bindings import BindingTable, Tagged, append, bind, unbind_snd
from resource_core.exceptions import Exhausted
from resource_core.organize import organize, select
from resource_core.pools import make_set, make_spec_set, release_set

from .exceptions import NotBound, ShrinkBelowZero

logger = logging.getLogger(__name__)


def held_regions(p, table):
    return [unbind_snd(b).value for b in table.bound_to(p)]


def held_size(p, table):
    return sum(r.size for r in held_regions(p, table))


def allocate_all(procs, memory, policy):
    """Bind every procedure to a region of ``memory``.

    For each p_i in policy order: check availability, carve R_i, move it from
    free to occupied, bind (p_i, R_i) and append the pair to the table. The
    batch is all-or-nothing.
    """
    policy.check_fits(procs)
    ordered = organize(procs, policy.order, policy.order_keys(procs))
    table = BindingTable()

    for i in range(1, len(ordered) + 1):
        p = select(ordered, i)
        try:
            region = make_set(memory, policy.region_size(p))
        except Exhausted as exc:
            logger.warning('allocation failed at %s, rolling back %d bindings', p.name, len(table))
            for b in reversed(table.entries):
                memory.give_back(unbind_snd(b).value)
            raise type(exc)(f'{p.name}: {exc}', procedure=p.name, **exc.context) from exc
        table = append(table, bind(Tagged.proc(p), Tagged.region(region)))

    logger.debug('allocated %d procedures with %s', len(table), policy.descriptor)
    return table


def apply_growth(p, event, memory, table):
    """Apply one change of memory need to procedure ``p``.

    Growth carves an extra region; shrinking gives back the most recently
    added regions first, splitting the last one if needed.
    """
    held = table.bound_to(p)
    if not held:
        raise NotBound(f'{p.name} holds no memory', procedure=p.name)
    if event.delta == 0:
        return table

    if event.delta > 0:
        region = make_set(memory, event.delta)
        logger.debug('%s grew by %d at tick %d: %s', p.name, event.delta, event.at_tick, region)
        return append(table, bind(Tagged.proc(p), Tagged.region(region)))

    amount = -event.delta
    current = held_size(p, table)
    if amount > current:
        raise ShrinkBelowZero(f'{p.name} holds {current} units, cannot give back {amount}', procedure=p.name)

    for b in reversed(held):
        if amount == 0:
            break
        region = unbind_snd(b).value
        table = release_set(memory, b, table)
        if region.size > amount:
            head = make_spec_set(memory, region.u_min, region.u_max - amount)
            table = append(table, bind(Tagged.proc(p), Tagged.region(head)))
            amount = 0
        else:
            amount -= region.size
    logger.debug('%s shrank by %d at tick %d', p.name, -event.delta, event.at_tick)
    return table


def free_procedure(p, memory, table):
    held = table.bound_to(p)
    if not held:
        raise NotBound(f'{p.name} holds no memory', procedure=p.name)
    for b in reversed(held):
        table = release_set(memory, b, table)
    return table


def internal_fragmentation(procs, policy):
    """Units allocated but not used by payloads (non-zero only for fixed
    partitions)."""
    return sum(policy.region_size(p) - p.payload_size for p in procs)
