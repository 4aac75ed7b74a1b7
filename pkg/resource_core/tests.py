import random

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from allocators.procedures import Procedure
from binding_glue.bindings import BindingTable, Tagged, append, bind, unbind_snd

from .audit import audit_partition
from .exceptions import (
    ConsumableResource,
    Exhausted,
    IndexOutOfRange,
    MissingKey,
    NoContiguousRun,
    SpanNotFree,
    SpanOutOfBounds,
    UniverseTooSmall,
    UnknownBinding,
)
from .organize import OrgSpec, organize, select
from .pools import (
    ResourcePool,
    enumerate_pool,
    make_set,
    make_spec_set,
    memory_pool,
    release_set,
    time_pool,
)
from .regions import Region, ResourceKind


def mem(u_min, u_max):
    return Region(ResourceKind.MEMORY, u_min, u_max)


def spans(ledger):
    return [(r.u_min, r.u_max) for r in ledger]


def carve_binding(pool, p, r, table):
    region = make_set(pool, r)
    b = bind(Tagged.proc(p), Tagged.region(region))
    return b, append(table, b)


class EnumerateTests(SimpleTestCase):
    def test_memory_pool_is_one_free_run(self):
        pool = memory_pool(16)
        self.assertEqual(spans(pool.free_ledger), [(0, 15)])
        self.assertEqual(pool.occupied_ledger, [])

    def test_time_pool_issues_on_demand(self):
        pool = time_pool()
        self.assertFalse(pool.finite)
        self.assertEqual(pool.next_fresh, 0)
        self.assertEqual(list(pool.free_ledger), [])

    def test_universe_too_small(self):
        with self.assertRaises(UniverseTooSmall):
            enumerate_pool(ResourcePool(ResourceKind.MEMORY, 8), names=['a', 'b', 'c', 'd'])

    def test_enumerate_is_idempotent(self):
        pool = memory_pool(16)
        make_set(pool, 4)
        enumerate_pool(pool)
        self.assertEqual(spans(pool.free_ledger), [(4, 15)])


class Sized:
    def __init__(self, label, size):
        self.label, self.size = label, size

    def __repr__(self):
        return self.label


class OrganizeTests(SimpleTestCase):
    def test_sort_ascending_by_size(self):
        items = [Sized('a', 5), Sized('b', 2), Sized('c', 9)]
        self.assertEqual([e.size for e in organize(items, OrgSpec.ascending())], [2, 5, 9])

    def test_sort_descending_keeps_ties_in_input_order(self):
        items = [Sized('a', 3), Sized('b', 7), Sized('c', 3)]
        self.assertEqual([e.label for e in organize(items, OrgSpec.descending())], ['b', 'a', 'c'])

    def test_identity(self):
        items = ['x', 'y', 'z']
        self.assertEqual(list(organize(items, OrgSpec.identity())), items)

    def test_constant_chunk_records_boundaries(self):
        organized = organize(range(10), OrgSpec.constant_chunk(4))
        self.assertEqual(list(organized), list(range(10)))
        self.assertEqual(organized.boundaries, (3, 7))
        self.assertEqual([list(c) for c in organized.chunks()], [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9]])

    def test_by_key(self):
        self.assertEqual(list(organize(['a', 'b'], OrgSpec.by_key('prio'), {'a': 2, 'b': 1})), ['b', 'a'])

    def test_missing_key(self):
        with self.assertRaises(MissingKey):
            organize(['a', 'b'], OrgSpec.by_key('prio'), {'a': 1})

    def test_select_is_one_based(self):
        self.assertEqual(select(['a', 'b', 'c'], 2), 'b')
        self.assertEqual(select(['a'], 1), 'a')
        with self.assertRaises(IndexOutOfRange):
            select(['a', 'b'], 3)
        with self.assertRaises(IndexOutOfRange):
            select(['a'], 0)

    @given(st.lists(st.integers(min_value=1, max_value=50)))
    def test_sorts_are_permutations(self, sizes):
        items = [Sized(str(i), s) for i, s in enumerate(sizes)]
        for spec in (OrgSpec.ascending(), OrgSpec.descending(), OrgSpec.identity()):
            self.assertCountEqual(organize(items, spec), items)

    @given(st.lists(st.integers(min_value=1, max_value=50)))
    def test_sorting_twice_equals_sorting_once(self, sizes):
        items = [Sized(str(i), s) for i, s in enumerate(sizes)]
        for spec in (OrgSpec.ascending(), OrgSpec.descending()):
            once = organize(items, spec)
            self.assertEqual(list(organize(once, spec)), list(once))
        keys = {str(i): s % 7 for i, s in enumerate(sizes)}
        by_key = organize([str(i) for i in range(len(sizes))], OrgSpec.by_key('prio'), keys)
        self.assertEqual(list(organize(by_key, OrgSpec.by_key('prio'), keys)), list(by_key))


class MakeSetTests(SimpleTestCase):
    def test_first_fit_on_fresh_pool(self):
        pool = memory_pool(16)
        self.assertEqual(make_set(pool, 4), mem(0, 3))
        self.assertEqual(spans(pool.free_ledger), [(4, 15)])
        self.assertEqual(pool.occupied_ledger, [mem(0, 3)])

    def test_first_fit_skips_short_runs(self):
        pool = memory_pool(16)
        make_spec_set(pool, 2, 5)
        self.assertEqual(spans(pool.free_ledger), [(0, 1), (6, 15)])
        self.assertEqual(make_set(pool, 4), mem(6, 9))

    def test_time_pool_mints_at_high_water_mark(self):
        pool = time_pool()
        make_set(pool, 7)
        interval = make_set(pool, 3)
        self.assertEqual((interval.u_min, interval.u_max), (7, 9))
        self.assertEqual(pool.next_fresh, 10)

    def test_exhausted_leaves_pool_unchanged(self):
        pool = memory_pool(8)
        make_set(pool, 6)
        before = pool.snapshot()
        with self.assertRaises(Exhausted) as ctx:
            make_set(pool, 3)
        self.assertNotIsInstance(ctx.exception, NoContiguousRun)
        self.assertEqual(ctx.exception.context, {'requested': 3, 'free': 2})
        self.assertEqual(pool.snapshot(), before)

    def test_fragmented_pool_raises_no_contiguous_run(self):
        pool = memory_pool(8)
        make_spec_set(pool, 2, 3)
        make_spec_set(pool, 6, 7)
        with self.assertRaises(NoContiguousRun):
            make_set(pool, 3)


class MakeSpecSetTests(SimpleTestCase):
    def test_pool_span_splits_free_run(self):
        pool = memory_pool(16)
        self.assertEqual(make_spec_set(pool, 4, 7), mem(4, 7))
        self.assertEqual(spans(pool.free_ledger), [(0, 3), (8, 15)])

    def test_span_not_free(self):
        pool = memory_pool(16)
        make_spec_set(pool, 4, 15)
        with self.assertRaises(SpanNotFree):
            make_spec_set(pool, 2, 6)

    def test_span_outside_pool(self):
        with self.assertRaises(SpanOutOfBounds):
            make_spec_set(memory_pool(8), 4, 8)

    def test_procedure_slice_is_pure(self):
        p = Procedure('p1', 12, 1)
        span = make_spec_set(p.address_space(), 0, 4)
        self.assertEqual((span.pool_kind, span.u_min, span.u_max), (ResourceKind.PROCEDURE, 0, 4))
        with self.assertRaises(SpanOutOfBounds):
            make_spec_set(p.address_space(), 10, 12)

    def test_region_slice_uses_offsets(self):
        region = Region(ResourceKind.VIRTUAL_MEMORY, 8, 11)
        self.assertEqual(make_spec_set(region, 1, 2), Region(ResourceKind.VIRTUAL_MEMORY, 9, 10))

    @given(st.integers(min_value=1, max_value=64), st.lists(st.integers(min_value=1, max_value=8), max_size=6))
    def test_first_free_span_equals_first_fit(self, r, carves):
        by_span, by_fit = enumerate_pool(memory_pool(64)), enumerate_pool(memory_pool(64))
        for size in carves:
            make_set(by_span, size)
            make_set(by_fit, size)
        first = next((run for run in by_span.free_ledger if run.size >= r), None)
        if first is None:
            with self.assertRaises(Exhausted):
                make_set(by_fit, r)
            return
        u = first.u_min
        self.assertEqual(make_spec_set(by_span, u, u + r - 1), make_set(by_fit, r))
        self.assertEqual(by_span.snapshot(), by_fit.snapshot())


class ReleaseSetTests(SimpleTestCase):
    def test_release_coalesces(self):
        pool = memory_pool(16)
        p1 = Procedure('p1', 4, 1)
        b, table = carve_binding(pool, p1, 4, BindingTable())
        table = release_set(pool, b, table)
        self.assertEqual(spans(pool.free_ledger), [(0, 15)])
        self.assertEqual(len(table), 0)

    def test_release_between_neighbours_merges_three_runs(self):
        pool = memory_pool(12)
        p = Procedure('p', 4, 1)
        table = BindingTable()
        bs = []
        for _ in range(3):
            b, table = carve_binding(pool, p, 4, table)
            bs.append(b)
        table = release_set(pool, bs[0], table)
        table = release_set(pool, bs[2], table)
        table = release_set(pool, bs[1], table)
        self.assertEqual(spans(pool.free_ledger), [(0, 11)])

    def test_time_is_consumable(self):
        time = time_pool()
        p = Procedure('p', 1, 1)
        b, table = carve_binding(time, p, 3, BindingTable())
        with self.assertRaises(ConsumableResource):
            release_set(time, b, table)
        self.assertEqual(time.occupied_ledger, [unbind_snd(b).value])

    def test_unknown_binding(self):
        pool = memory_pool(16)
        p = Procedure('p', 4, 1)
        b = bind(Tagged.proc(p), Tagged.region(mem(0, 3)))
        with self.assertRaises(UnknownBinding):
            release_set(pool, b, BindingTable())


class ConsumableLawTests(SimpleTestCase):
    def test_release_on_time_always_refused(self):
        rng = random.Random(7)
        time = time_pool()
        p = Procedure('p', 1, 1)
        table = BindingTable()
        bindings = []
        for _ in range(100):
            b, table = carve_binding(time, p, rng.randint(1, 5), table)
            bindings.append(b)
        refused = 0
        for b in bindings:
            try:
                release_set(time, b, table)
            except ConsumableResource:
                refused += 1
        self.assertEqual(refused, 100)

    def test_ten_thousand_carves_are_disjoint(self):
        rng = random.Random(11)
        time = time_pool()
        intervals = [make_set(time, rng.randint(1, 4)) for _ in range(10000)]
        for a, b in zip(intervals, intervals[1:]):
            self.assertEqual(a.u_max + 1, b.u_min)
        self.assertTrue(audit_partition(time).passed)


class AuditTests(SimpleTestCase):
    def test_fresh_pool_passes(self):
        report = audit_partition(memory_pool(32))
        self.assertTrue(report.total_ok and report.exclusivity_ok and report.union_ok and report.disjoint_ok)
        self.assertTrue(report.passed)

    def test_overlapping_occupied_regions(self):
        pool = memory_pool(16)
        make_spec_set(pool, 0, 3)
        # corrupt the ledger: a second claim on 2..5, taken out of nothing
        pool.occupied_ledger.append(mem(2, 5))
        pool.free_ledger.discard(pool.free_ledger[0])
        pool.free_ledger.add(mem(6, 15))
        report = audit_partition(pool)
        self.assertFalse(report.disjoint_ok)
        self.assertEqual(len([v for v in report.violations if v.startswith('disjoint:')]), 1)

    def test_free_and_occupied_overlap(self):
        pool = memory_pool(8)
        pool.occupied_ledger.append(mem(0, 1))
        report = audit_partition(pool)
        self.assertFalse(report.exclusivity_ok)
        self.assertFalse(report.total_ok)

    def test_gap_breaks_union(self):
        pool = memory_pool(8)
        pool.free_ledger.clear()
        pool.free_ledger.add(mem(0, 3))
        report = audit_partition(pool)
        self.assertFalse(report.union_ok)
        self.assertFalse(report.total_ok)


class PartitionInvariantTests(SimpleTestCase):
    """Random make_set / release_set / growth sequences against a per-element
    ownership array."""

    def check(self, pool, owner):
        report = audit_partition(pool)
        self.assertTrue(report.passed, report.violations)
        free = {a for r in pool.free_ledger for a in range(r.u_min, r.u_max + 1)}
        self.assertEqual(free, {a for a, o in enumerate(owner) if o is None})
        held = {}
        for r in pool.occupied_ledger:
            for a in range(r.u_min, r.u_max + 1):
                held[a] = held.get(a, 0) + 1
        self.assertTrue(all(n == 1 for n in held.values()))
        self.assertEqual(set(held), {a for a, o in enumerate(owner) if o is not None})

    def test_random_operation_sequences(self):
        rng = random.Random(2026)
        for _ in range(1000):
            capacity = rng.randint(1, 128)
            pool = memory_pool(capacity)
            owner = [None] * capacity
            procs = [Procedure(f'p{i}', rng.randint(1, 32), 1) for i in range(1, rng.randint(1, 8) + 1)]
            table = BindingTable()

            for _ in range(rng.randint(1, 12)):
                p = rng.choice(procs)
                op = rng.choice(('make', 'release', 'grow'))
                held = table.bound_to(p)
                if op == 'release' and held:
                    b = rng.choice(held)
                    region = unbind_snd(b).value
                    table = release_set(pool, b, table)
                    for a in range(region.u_min, region.u_max + 1):
                        owner[a] = None
                else:
                    size = p.payload_size if op == 'make' else rng.randint(1, 8)
                    before = pool.snapshot()
                    try:
                        b, table = carve_binding(pool, p, size, table)
                    except Exhausted:
                        self.assertEqual(pool.snapshot(), before)
                        continue
                    region = unbind_snd(b).value
                    for a in range(region.u_min, region.u_max + 1):
                        self.assertIsNone(owner[a])
                        owner[a] = p.name
                self.check(pool, owner)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=16), min_size=1, max_size=10), st.randoms())
    def test_release_in_any_order_restores_fresh_pool(self, sizes, rnd):
        pool = memory_pool(sum(sizes))
        p = Procedure('p', 1, 1)
        table = BindingTable()
        bindings = []
        for size in sizes:
            b, table = carve_binding(pool, p, size, table)
            bindings.append(b)
        rnd.shuffle(bindings)
        for b in bindings:
            table = release_set(pool, b, table)
        self.assertEqual(spans(pool.free_ledger), [(0, sum(sizes) - 1)])
        self.assertEqual(pool.occupied_ledger, [])
