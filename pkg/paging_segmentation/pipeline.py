"""Segmentation over virtual memory followed by paging over physical memory.

Every step keeps both pools partitioned: anything carved by a step that fails
is given back before the error leaves the step.
"""
import logging
from collections import namedtuple
from operator import attrgetter

from sortedcontainers import SortedKeyList

from binding_glue.bindings import BindingTable, Tagged, append, bind
from resource_core.exceptions import Exhausted
from resource_core.organize import OrgSpec, organize, select
from resource_core.pools import enumerate_pool, make_set, make_spec_set

from .exceptions import MisalignedFrames
from .tables import PageTable, PagingResult, SegmentTable

logger = logging.getLogger(__name__)

SegsData = namedtuple('SegsData', ['k', 'boundaries'])


def _sizes(segdata):
    a = segdata.boundaries
    # a_{i+1} - a_i, so the segments tile the procedure exactly
    return [a[i + 1] - a[i] for i in range(segdata.k)]


def _pages(size, g):
    return -(-size // g)


def pages_needed(p, g):
    return sum(_pages(size, g) for size in _sizes(get_segs_data(p)))


def get_segs_data(p):
    return SegsData(len(p.seg_boundaries) - 1, tuple(p.seg_boundaries))


def proc_segs(p, segdata):
    space = p.address_space()
    a = segdata.boundaries
    return [make_spec_set(space, a[i], a[i + 1] - 1) for i in range(segdata.k)]


def make_segs(vm, segdata):
    carved = []
    for i, size in enumerate(_sizes(segdata), start=1):
        try:
            carved.append(make_set(vm, size))
        except Exhausted as exc:
            for region in reversed(carved):
                vm.give_back(region)
            raise type(exc)(f'segment {i}: {exc}', segment=i, **exc.context) from exc
    return carved


def seg_tab(vm, p, segdata):
    # both sets exist before anything is bound
    ps = proc_segs(p, segdata)
    s = make_segs(vm, segdata)
    table = BindingTable()
    for i in range(1, segdata.k + 1):
        table = append(table, bind(Tagged.procseg(select(ps, i)), Tagged.vmseg(select(s, i))))
    return SegmentTable(p.name, table)


def make_page(s, g):
    count = _pages(s.size, g)
    return [make_spec_set(s, (i - 1) * g, min(i * g, s.size) - 1) for i in range(1, count + 1)]


def make_frame(phys, g, count):
    """Carve ``count`` frames of size ``g``; every free run large enough to
    hold a frame must start on a frame boundary."""
    misaligned = [r for r in enumerate_pool(phys).free_ledger if r.size >= g and r.u_min % g]
    if misaligned:
        raise MisalignedFrames(
            f'free runs {", ".join(map(str, misaligned))} do not start on a multiple of {g}',
            page_size=g,
        )
    frames = []
    for _ in range(count):
        try:
            frames.append(make_set(phys, g))
        except Exhausted as exc:
            obtained = len(frames)
            for frame in reversed(frames):
                phys.give_back(frame)
            raise type(exc)(
                f'framing stopped after {obtained} of {count} frames: {exc}',
                frames_obtained=obtained, **exc.context,
            ) from exc
    return frames


def page_tab(phys, s, g, owner=None, free_frames=None):
    """Bind the pages of segment ``s`` to frames.

    Without ``free_frames`` fresh frames are carved and page i gets frame i.
    With a pre-framed list each page takes the lowest free frame.
    """
    pg_set = make_page(s, g)
    if free_frames is None:
        fr_set = make_frame(phys, g, len(pg_set))
    else:
        if len(free_frames) < len(pg_set):
            raise Exhausted(
                f'{len(pg_set)} pages but only {len(free_frames)} free frames',
                requested=len(pg_set), free=len(free_frames),
            )
        fr_set = [free_frames.pop(0) for _ in pg_set]

    table = BindingTable()
    for i in range(1, len(pg_set) + 1):
        table = append(table, bind(Tagged.vmpage(select(pg_set, i)), Tagged.frame(select(fr_set, i))))
    return PageTable(owner, table)


def _roll_back(vm, phys, seg_table, page_tables, free_frames):
    for pt in page_tables:
        for frame in pt.frames:
            if free_frames is None:
                phys.give_back(frame)
            else:
                free_frames.add(frame)
    if seg_table is not None:
        for row in reversed(seg_table.rows):
            vm.give_back(row.vm_span)


def do_page_seg(procs, vm, phys, g, hoist_frames=False, order=None, keys=None, observer=None):
    """Segment every procedure over ``vm`` and page it over ``phys``.

    ``observer(step, procedure)`` is called after each constituent step. With
    ``hoist_frames`` the whole frame demand is carved once, before the loop.
    A failing procedure is rolled back completely before the error is raised.
    """
    notify = observer or (lambda step, p: None)
    ordered = organize(procs, order or OrgSpec.identity(), keys)
    result = PagingResult()

    free_frames = None
    if hoist_frames:
        demand = sum(pages_needed(p, g) for p in ordered)
        free_frames = SortedKeyList(make_frame(phys, g, demand), key=attrgetter('u_min'))
        notify('make_frame', None)

    try:
        for i in range(1, len(ordered) + 1):
            p = select(ordered, i)
            st, pts = None, []
            try:
                segdata = get_segs_data(p)
                st = seg_tab(vm, p, segdata)
                notify('seg_tab', p)
                for row in st.rows:
                    pts.append(page_tab(phys, row.vm_span, g, (p.name, row.seg_index), free_frames))
                    notify('page_tab', p)
            except Exhausted as exc:
                logger.warning('paging %s failed, rolling it back', p.name)
                _roll_back(vm, phys, st, pts, free_frames)
                raise type(exc)(f'{p.name}: {exc}', procedure=p.name, **exc.context) from exc
            result.add(st, pts)
    except Exhausted:
        if free_frames:
            for frame in free_frames:
                phys.give_back(frame)
            free_frames.clear()
            notify('rollback', None)
        raise

    logger.debug('paged %d procedures into %d page tables', len(result.seg_tables), len(result.page_tables))
    return result
