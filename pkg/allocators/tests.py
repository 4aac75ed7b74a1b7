import random

from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from binding_glue.bindings import BindingTable, unbind_fst, unbind_snd
from resource_core.audit import audit_partition
from resource_core.exceptions import Exhausted
from resource_core.pools import memory_pool
from resource_core.regions import Region, ResourceKind

from .allocate import allocate_all, apply_growth, free_procedure, held_regions, held_size, internal_fragmentation
from .exceptions import InvalidPolicy, InvalidProcedure, NotBound, ShrinkBelowZero
from .policy import AllocationPolicy, Partitioning
from .procedures import GrowthEvent, Procedure


def mem(u_min, u_max):
    return Region(ResourceKind.MEMORY, u_min, u_max)


def layout(table):
    return [(unbind_fst(b).value.name, (unbind_snd(b).value.u_min, unbind_snd(b).value.u_max)) for b in table]


class ProcedureTests(SimpleTestCase):
    def test_default_single_segment(self):
        p = Procedure('p1', 5, 3)
        self.assertEqual(p.seg_boundaries, (0, 5))
        self.assertEqual(p.segment_count, 1)
        self.assertEqual(str(p), 'p1')

    def test_boundaries_must_end_at_size(self):
        with self.assertRaisesMessage(InvalidProcedure, 'end at size 5'):
            Procedure('p1', 5, 3, seg_boundaries=(0, 4))

    def test_boundaries_must_increase(self):
        with self.assertRaises(InvalidProcedure):
            Procedure('p1', 12, 3, seg_boundaries=(0, 12, 5))
        with self.assertRaises(InvalidProcedure):
            Procedure('p1', 12, 3, seg_boundaries=(0, 5, 5, 12))

    def test_size_and_time_positive(self):
        with self.assertRaises(InvalidProcedure):
            Procedure('p1', 0, 3)
        with self.assertRaises(InvalidProcedure):
            Procedure('p1', 3, 0)

    def test_growth_ticks_inside_run(self):
        with self.assertRaises(InvalidProcedure):
            Procedure('p1', 5, 3, growth_schedule=(GrowthEvent(3, 1),))
        with self.assertRaises(InvalidProcedure):
            Procedure('p1', 5, 3, growth_schedule=(GrowthEvent(1, -5),))
        p = Procedure('p1', 5, 3, growth_schedule=[GrowthEvent(1, 2), GrowthEvent(2, -6)])
        self.assertEqual(p.growth_at(2), [GrowthEvent(2, -6)])


class PolicyTests(SimpleTestCase):
    def test_descriptors(self):
        for text in ('fcfs', 'ssf', 'prio', 'fixed:8'):
            self.assertEqual(AllocationPolicy.from_descriptor(text).descriptor, text)

    def test_bad_descriptors(self):
        for text in ('best', 'fixed:', 'fixed:0'):
            with self.assertRaises(InvalidPolicy):
                AllocationPolicy.from_descriptor(text)

    def test_fixed_partition_must_fit(self):
        policy = AllocationPolicy(partitioning=Partitioning.FIXED, partition_size=4)
        with self.assertRaises(InvalidPolicy):
            policy.check_fits([Procedure('p1', 5, 1)])


class AllocateAllTests(SimpleTestCase):
    def setUp(self):
        self.p1 = Procedure('p1', 5, 1)
        self.p2 = Procedure('p2', 7, 1)

    def test_fcfs_first_fit(self):
        table = allocate_all([self.p1, self.p2], memory_pool(32), AllocationPolicy())
        self.assertEqual(layout(table), [('p1', (0, 4)), ('p2', (5, 11))])

    def test_shortest_size_first_on_sorted_input(self):
        policy = AllocationPolicy.from_descriptor('ssf')
        table = allocate_all([self.p1, self.p2], memory_pool(32), policy)
        self.assertEqual(layout(table), [('p1', (0, 4)), ('p2', (5, 11))])

    def test_shortest_size_first_reorders(self):
        policy = AllocationPolicy.from_descriptor('ssf')
        table = allocate_all([self.p2, self.p1], memory_pool(32), policy)
        self.assertEqual(layout(table), [('p1', (0, 4)), ('p2', (5, 11))])

    def test_priority_order(self):
        a, b = Procedure('a', 3, 1, priority=2), Procedure('b', 3, 1, priority=1)
        table = allocate_all([a, b], memory_pool(8), AllocationPolicy.from_descriptor('prio'))
        self.assertEqual(layout(table), [('b', (0, 2)), ('a', (3, 5))])

    def test_fixed_partitions_and_waste(self):
        policy = AllocationPolicy.from_descriptor('fixed:8')
        table = allocate_all([self.p1, self.p2], memory_pool(32), policy)
        self.assertEqual(layout(table), [('p1', (0, 7)), ('p2', (8, 15))])
        self.assertEqual(internal_fragmentation([self.p1, self.p2], policy), 4)
        self.assertEqual(internal_fragmentation([self.p1, self.p2], AllocationPolicy()), 0)

    def test_batch_is_all_or_nothing(self):
        memory = memory_pool(10)
        before = memory.snapshot()
        with self.assertRaises(Exhausted) as ctx:
            allocate_all([self.p1, self.p2], memory, AllocationPolicy())
        self.assertEqual(ctx.exception.context['procedure'], 'p2')
        self.assertEqual(memory.snapshot(), before)
        self.assertTrue(audit_partition(memory).passed)


class GrowthTests(SimpleTestCase):
    def setUp(self):
        self.memory = memory_pool(32)
        self.p = Procedure('p', 5, 4)
        self.table = allocate_all([self.p], self.memory, AllocationPolicy())

    def test_grow_carves_extra_region(self):
        table = apply_growth(self.p, GrowthEvent(1, 3), self.memory, self.table)
        self.assertEqual(held_regions(self.p, table), [mem(0, 4), mem(5, 7)])

    def test_zero_delta_is_noop(self):
        self.assertIs(apply_growth(self.p, GrowthEvent(1, 0), self.memory, self.table), self.table)

    def test_shrink_below_zero(self):
        with self.assertRaises(ShrinkBelowZero):
            apply_growth(self.p, GrowthEvent(1, -6), self.memory, self.table)

    def test_shrink_releases_newest_first_and_splits(self):
        table = apply_growth(self.p, GrowthEvent(1, 3), self.memory, self.table)
        table = apply_growth(self.p, GrowthEvent(2, -4), self.memory, table)
        self.assertEqual(held_regions(self.p, table), [mem(0, 3)])
        self.assertEqual(held_size(self.p, table), 4)
        self.assertTrue(audit_partition(self.memory).passed)
        self.assertEqual([(r.u_min, r.u_max) for r in self.memory.free_ledger], [(4, 31)])

    def test_growth_of_unbound_procedure(self):
        with self.assertRaises(NotBound):
            apply_growth(Procedure('q', 1, 2), GrowthEvent(1, 1), self.memory, self.table)

    @given(
        st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=5),
        st.integers(min_value=1, max_value=6),
        st.data(),
    )
    def test_growth_then_inverse_restores_state(self, sizes, delta, data):
        procs = [Procedure(f'p{i}', size, 3) for i, size in enumerate(sizes)]
        memory = memory_pool(64)
        table = allocate_all(procs, memory, AllocationPolicy())
        p = data.draw(st.sampled_from(procs))
        free_before, size_before = memory.snapshot().free, held_size(p, table)

        table = apply_growth(p, GrowthEvent(1, delta), memory, table)
        self.assertEqual(held_size(p, table), size_before + delta)
        table = apply_growth(p, GrowthEvent(2, -delta), memory, table)

        self.assertEqual(memory.snapshot().free, free_before)
        self.assertEqual(held_size(p, table), size_before)
        self.assertTrue(audit_partition(memory).passed)

    @given(st.integers(min_value=2, max_value=12), st.data())
    def test_shrink_then_inverse_restores_state(self, size, data):
        p = Procedure('p', size, 3)
        memory = memory_pool(32)
        table = allocate_all([p], memory, AllocationPolicy())
        delta = data.draw(st.integers(min_value=1, max_value=size - 1))
        before = memory.snapshot()

        table = apply_growth(p, GrowthEvent(1, -delta), memory, table)
        table = apply_growth(p, GrowthEvent(2, delta), memory, table)

        self.assertEqual(memory.snapshot().free, before.free)
        self.assertEqual(held_size(p, table), size)
        self.assertEqual(
            sorted((r.u_min, r.u_max) for r in held_regions(p, table)),
            [(0, size - delta - 1), (size - delta, size - 1)],
        )



class FreeProcedureTests(SimpleTestCase):
    def test_free_returns_region(self):
        memory = memory_pool(32)
        p1 = Procedure('p1', 5, 1)
        table = allocate_all([p1], memory, AllocationPolicy())
        table = free_procedure(p1, memory, table)
        self.assertEqual(len(table), 0)
        self.assertEqual([(r.u_min, r.u_max) for r in memory.free_ledger], [(0, 31)])

    def test_free_unbound(self):
        with self.assertRaises(NotBound):
            free_procedure(Procedure('p1', 5, 1), memory_pool(8), BindingTable())

    def test_allocate_grow_then_free_all_restores_pool(self):
        rng = random.Random(5)
        for _ in range(200):
            procs = [Procedure(f'p{i}', rng.randint(1, 8), 3) for i in range(rng.randint(1, 6))]
            memory = memory_pool(128)
            fresh = memory.snapshot()
            table = allocate_all(procs, memory, AllocationPolicy())
            for p in procs:
                delta = rng.randint(-p.payload_size + 1, 6)
                table = apply_growth(p, GrowthEvent(1, delta), memory, table)
                self.assertTrue(audit_partition(memory).passed)
            for p in rng.sample(procs, len(procs)):
                table = free_procedure(p, memory, table)
            self.assertEqual(memory.snapshot(), fresh)
