import random

from django.test import SimpleTestCase

from allocators.procedures import Procedure
from resource_core.audit import audit_partition
from resource_core.exceptions import Exhausted
from resource_core.pools import make_spec_set, memory_pool, virtual_memory_pool
from resource_core.regions import Region, ResourceKind

from .exceptions import AddressOutOfRange, InvalidPagingConfig, MisalignedFrames, TableIncomplete
from .pipeline import (
    do_page_seg,
    get_segs_data,
    make_frame,
    make_page,
    make_segs,
    page_tab,
    pages_needed,
    proc_segs,
    seg_tab,
)
from .tables import PagingConfig
from .translate import translate

W1 = [
    Procedure('p1', 5, 3, seg_boundaries=(0, 5)),
    Procedure('p2', 7, 2, seg_boundaries=(0, 3, 7)),
]

W1_ROWS = [
    'SEG\tp1\t1\t0\t4\t0\t4',
    'PAGE\tp1\t1\t1\t0\t3\t0\t3',
    'PAGE\tp1\t1\t2\t4\t4\t4\t7',
    'SEG\tp2\t1\t0\t2\t5\t7',
    'SEG\tp2\t2\t3\t6\t8\t11',
    'PAGE\tp2\t1\t1\t5\t7\t8\t11',
    'PAGE\tp2\t2\t1\t8\t11\t12\t15',
]


def vm(u_min, u_max):
    return Region(ResourceKind.VIRTUAL_MEMORY, u_min, u_max)


def bounds(regions):
    return [(r.u_min, r.u_max) for r in regions]


def random_procedure(rng, name, max_size):
    size = rng.randint(1, max_size)
    cuts = sorted(rng.sample(range(1, size), rng.randint(0, min(3, size - 1)))) if size > 1 else []
    return Procedure(name, size, rng.randint(1, 4), seg_boundaries=(0, *cuts, size))


def brute_force_layout(procs, g):
    """Independent first-fit layout on fresh pools: segments and frames are
    handed out back to back."""
    rows, vm_next, frame_next = [], 0, 0
    for p in procs:
        a = p.seg_boundaries
        seg_starts = []
        for i in range(len(a) - 1):
            size = a[i + 1] - a[i]
            rows.append(f'SEG\t{p.name}\t{i + 1}\t{a[i]}\t{a[i + 1] - 1}\t{vm_next}\t{vm_next + size - 1}')
            seg_starts.append(vm_next)
            vm_next += size
        for i, start in enumerate(seg_starts):
            size = a[i + 1] - a[i]
            for j in range(0, size, g):
                lo, hi = start + j, start + min(j + g, size) - 1
                rows.append(
                    f'PAGE\t{p.name}\t{i + 1}\t{j // g + 1}\t{lo}\t{hi}\t{frame_next}\t{frame_next + g - 1}'
                )
                frame_next += g
    return rows


class SegsDataTests(SimpleTestCase):
    def test_projection(self):
        self.assertEqual(tuple(get_segs_data(Procedure('p', 12, 1, seg_boundaries=(0, 5, 12)))), (2, (0, 5, 12)))
        self.assertEqual(get_segs_data(Procedure('p', 5, 1)).k, 1)

    def test_proc_segs_tile_the_procedure(self):
        p = Procedure('p', 12, 1, seg_boundaries=(0, 5, 12))
        self.assertEqual(bounds(proc_segs(p, get_segs_data(p))), [(0, 4), (5, 11)])
        tiny = Procedure('q', 1, 1)
        self.assertEqual(bounds(proc_segs(tiny, get_segs_data(tiny))), [(0, 0)])


class MakeSegsTests(SimpleTestCase):
    def test_first_fit(self):
        p = Procedure('p', 12, 1, seg_boundaries=(0, 5, 12))
        self.assertEqual(bounds(make_segs(virtual_memory_pool(64), get_segs_data(p))), [(0, 4), (5, 11)])

    def test_fragmented_vm(self):
        pool = virtual_memory_pool(64)
        make_spec_set(pool, 3, 9)
        self.assertEqual(bounds(make_segs(pool, get_segs_data(Procedure('p', 5, 1)))), [(10, 14)])

    def test_exhausted_at_second_segment(self):
        pool = virtual_memory_pool(8)
        p = Procedure('p', 12, 1, seg_boundaries=(0, 5, 12))
        with self.assertRaises(Exhausted) as ctx:
            make_segs(pool, get_segs_data(p))
        self.assertEqual(ctx.exception.context['segment'], 2)
        self.assertEqual(bounds(pool.free_ledger), [(0, 7)])


class SegTabTests(SimpleTestCase):
    def test_rows(self):
        p = Procedure('p', 12, 1, seg_boundaries=(0, 5, 12))
        rows = seg_tab(virtual_memory_pool(64), p, get_segs_data(p)).rows
        self.assertEqual(
            [(r.seg_index, (r.proc_span.u_min, r.proc_span.u_max), (r.vm_span.u_min, r.vm_span.u_max)) for r in rows],
            [(1, (0, 4), (0, 4)), (2, (5, 11), (5, 11))],
        )

    def test_too_small_leaves_nothing(self):
        pool = virtual_memory_pool(4)
        p = Procedure('p', 5, 1)
        with self.assertRaises(Exhausted):
            seg_tab(pool, p, get_segs_data(p))
        self.assertTrue(audit_partition(pool).passed)
        self.assertEqual(pool.occupied_ledger, [])


class PagingTests(SimpleTestCase):
    def test_make_page_tiles_segment(self):
        self.assertEqual([r.size for r in make_page(vm(0, 9), 4)], [4, 4, 2])
        self.assertEqual([r.size for r in make_page(vm(0, 3), 4)], [4])
        self.assertEqual([r.size for r in make_page(vm(0, 2), 8)], [3])

    def test_make_frame(self):
        self.assertEqual(bounds(make_frame(memory_pool(32), 4, 4)), [(0, 3), (4, 7), (8, 11), (12, 15)])

    def test_make_frame_rolls_back(self):
        phys = memory_pool(8)
        with self.assertRaises(Exhausted) as ctx:
            make_frame(phys, 4, 3)
        self.assertEqual(ctx.exception.context['frames_obtained'], 2)
        self.assertEqual(bounds(phys.free_ledger), [(0, 7)])

    def test_make_frame_after_aligned_carve(self):
        phys = memory_pool(16)
        make_spec_set(phys, 0, 3)
        self.assertEqual(bounds(make_frame(phys, 4, 2)), [(4, 7), (8, 11)])

    def test_make_frame_refuses_misaligned_runs(self):
        phys = memory_pool(16)
        make_spec_set(phys, 0, 5)
        before = phys.snapshot()
        with self.assertRaises(MisalignedFrames):
            make_frame(phys, 4, 1)
        self.assertEqual(phys.snapshot(), before)
        self.assertTrue(audit_partition(phys).passed)

    def test_zero_frames(self):
        phys = memory_pool(8)
        self.assertEqual(make_frame(phys, 4, 0), [])
        self.assertEqual(bounds(phys.free_ledger), [(0, 7)])

    def test_page_tab_positional(self):
        rows = page_tab(memory_pool(32), vm(0, 9), 4).rows
        self.assertEqual(
            [(r.page_index, (r.vm_span.u_min, r.vm_span.u_max), (r.frame.u_min, r.frame.u_max)) for r in rows],
            [(1, (0, 3), (0, 3)), (2, (4, 7), (4, 7)), (3, (8, 9), (8, 11))],
        )

    def test_page_tab_short_of_hoisted_frames(self):
        phys = memory_pool(32)
        frames = make_frame(phys, 4, 2)
        with self.assertRaises(Exhausted):
            page_tab(phys, vm(0, 9), 4, free_frames=frames)

    def test_config_requires_whole_frames(self):
        with self.assertRaises(InvalidPagingConfig):
            PagingConfig(page_size=4, vm_capacity=64, phys_capacity=30)


class DoPageSegTests(SimpleTestCase):
    def test_w1_tables(self):
        result = do_page_seg(W1, virtual_memory_pool(64), memory_pool(32), 4)
        self.assertEqual(result.machine_rows(), W1_ROWS)

    def test_w1_matches_brute_force_layout(self):
        self.assertEqual(brute_force_layout(W1, 4), W1_ROWS)

    def test_w1_hoisted(self):
        result = do_page_seg(W1, virtual_memory_pool(64), memory_pool(32), 4, hoist_frames=True)
        self.assertEqual(result.machine_rows(), W1_ROWS)

    def test_exact_fit_chain(self):
        result = do_page_seg([Procedure('p', 4, 1)], virtual_memory_pool(4), memory_pool(4), 4)
        self.assertEqual(result.machine_rows(), ['SEG\tp\t1\t0\t3\t0\t3', 'PAGE\tp\t1\t1\t0\t3\t0\t3'])

    def test_failure_rolls_back_failing_procedure(self):
        vm_pool, phys = virtual_memory_pool(64), memory_pool(12)
        with self.assertRaises(Exhausted) as ctx:
            do_page_seg(W1, vm_pool, phys, 4)
        self.assertEqual(ctx.exception.context['procedure'], 'p2')
        # p1 stays paged, nothing of p2 is left behind
        self.assertEqual(vm_pool.occupied_total, 5)
        self.assertEqual(phys.occupied_total, 8)
        self.assertTrue(audit_partition(vm_pool).passed)
        self.assertTrue(audit_partition(phys).passed)

    def test_hoisted_failure_returns_frames(self):
        phys = memory_pool(8)
        with self.assertRaises(Exhausted):
            do_page_seg(W1, virtual_memory_pool(64), phys, 4, hoist_frames=True)
        self.assertEqual(phys.occupied_ledger, [])

    def test_hoisted_failure_keeps_only_used_frames(self):
        phys = memory_pool(32)
        with self.assertRaises(Exhausted):
            do_page_seg(W1, virtual_memory_pool(8), phys, 4, hoist_frames=True)
        # p1 keeps its two frames, the two pre-framed for p2 go back
        self.assertEqual(bounds(phys.occupied_ledger), [(0, 3), (4, 7)])
        self.assertTrue(audit_partition(phys).passed)

    def test_observer_sees_steps(self):
        steps = []
        do_page_seg(W1, virtual_memory_pool(64), memory_pool(32), 4, observer=lambda s, p: steps.append(s))
        self.assertEqual(steps, ['seg_tab', 'page_tab', 'seg_tab', 'page_tab', 'page_tab'])

    def assert_partitioned(self, step, *pools):
        for pool in pools:
            report = audit_partition(pool)
            self.assertTrue(report.passed, f'after {step}: {report.violations}')

    def page_audited(self, procs, vm_pool, phys, g, **kwargs):
        """do_page_seg with both pools audited after every step and after a failure."""
        def observer(step, p):
            self.assert_partitioned(step, vm_pool, phys)

        try:
            return do_page_seg(procs, vm_pool, phys, g, observer=observer, **kwargs)
        finally:
            self.assert_partitioned('the last step', vm_pool, phys)

    def test_random_layouts_match_brute_force(self):
        rng = random.Random(17)
        for _ in range(300):
            g = rng.choice([1, 2, 4, 8])
            procs = [random_procedure(rng, f'p{i}', 20) for i in range(1, rng.randint(1, 4) + 1)]
            result = self.page_audited(procs, virtual_memory_pool(128), memory_pool(g * 128), g)
            self.assertEqual(result.machine_rows(), brute_force_layout(procs, g))

    def test_hoisting_commutes(self):
        rng = random.Random(200)
        compared = failed = 0
        for _ in range(200):
            g = rng.choice([1, 2, 4, 8])
            procs = [random_procedure(rng, f'p{i}', 20) for i in range(1, rng.randint(1, 5) + 1)]
            vm_cap, phys_frames = rng.randint(8, 96), rng.randint(2, 40)
            outcomes = []
            for hoist in (False, True):
                try:
                    result = self.page_audited(procs, virtual_memory_pool(vm_cap), memory_pool(g * phys_frames), g,
                                               hoist_frames=hoist)
                    outcomes.append(result.machine_rows())
                except Exhausted:
                    failed += 1
                    outcomes.append(None)
            if None not in outcomes:
                compared += 1
                self.assertEqual(outcomes[0], outcomes[1])
        self.assertGreater(compared, 0)
        self.assertGreater(failed, 0)


class TranslateTests(SimpleTestCase):
    def setUp(self):
        self.result = do_page_seg(W1, virtual_memory_pool(64), memory_pool(32), 4)

    def tr(self, p, addr):
        return translate(p, addr, self.result.seg_tables, self.result.page_tables)

    def test_w1_p2_address_5(self):
        self.assertEqual(self.tr(W1[1], 5), 14)

    def test_address_zero(self):
        self.assertEqual(self.tr(W1[0], 0), 0)
        self.assertEqual(self.tr(W1[1], 0), 8)

    def test_out_of_range(self):
        with self.assertRaises(AddressOutOfRange):
            self.tr(W1[0], 5)

    def test_missing_tables(self):
        with self.assertRaises(TableIncomplete):
            translate(Procedure('q', 3, 1), 0, self.result.seg_tables, self.result.page_tables)

    def test_exhaustive_translation_is_injective(self):
        rng = random.Random(23)
        for _ in range(400):
            g = rng.choice([1, 2, 4, 8])
            procs = [random_procedure(rng, f'p{i}', 20) for i in range(1, rng.randint(1, 4) + 1)]
            result = do_page_seg(procs, virtual_memory_pool(128), memory_pool(g * 128), g)
            images = {}
            for p in procs:
                st = result.seg_tables[p.name]
                self.assertEqual(sum(r.proc_span.size for r in st.rows), p.payload_size)
                for row in st.rows:
                    pages = result.page_tables[(p.name, row.seg_index)].rows
                    self.assertEqual(sum(r.vm_span.size for r in pages), row.vm_span.size)
                image = [translate(p, a, result.seg_tables, result.page_tables) for a in range(p.payload_size)]
                self.assertEqual(len(set(image)), len(image))
                images[p.name] = set(image)
            names = list(images)
            for i, a in enumerate(names):
                for b in names[i + 1:]:
                    self.assertFalse(images[a] & images[b])

    def test_pages_needed(self):
        self.assertEqual(pages_needed(W1[0], 4), 2)
        self.assertEqual(pages_needed(W1[1], 4), 2)
