from collections import namedtuple
from dataclasses import dataclass, field

from binding_glue.bindings import BindingTable, unbind_fst, unbind_snd

from .exceptions import InvalidPagingConfig

SegmentRow = namedtuple('SegmentRow', ['seg_index', 'proc_span', 'vm_span'])
PageRow = namedtuple('PageRow', ['page_index', 'vm_span', 'frame'])


@dataclass(frozen=True)
class PagingConfig:
    page_size: int
    vm_capacity: int
    phys_capacity: int
    hoist_frames: bool = False

    def __post_init__(self):
        if self.page_size < 1:
            raise InvalidPagingConfig('page size must be >= 1')
        if self.vm_capacity < 1 or self.phys_capacity < 1:
            raise InvalidPagingConfig('memory capacities must be >= 1')
        if self.phys_capacity % self.page_size:
            raise InvalidPagingConfig(
                f'physical memory {self.phys_capacity} is not a multiple of page size {self.page_size}'
            )


@dataclass(frozen=True)
class SegmentTable:
    """procseg -> vmseg bindings of one procedure, row i is segment i."""

    owner: str
    bindings: BindingTable = BindingTable()

    @property
    def rows(self):
        return [
            SegmentRow(i, unbind_fst(b).value, unbind_snd(b).value)
            for i, b in enumerate(self.bindings, start=1)
        ]

    def machine_rows(self):
        return [
            f'SEG\t{self.owner}\t{r.seg_index}\t{r.proc_span.u_min}\t{r.proc_span.u_max}'
            f'\t{r.vm_span.u_min}\t{r.vm_span.u_max}'
            for r in self.rows
        ]


@dataclass(frozen=True)
class PageTable:
    """vmpage -> frame bindings for one segment; owner is (procedure, seg)."""

    owner: tuple
    bindings: BindingTable = BindingTable()

    @property
    def rows(self):
        return [
            PageRow(i, unbind_fst(b).value, unbind_snd(b).value)
            for i, b in enumerate(self.bindings, start=1)
        ]

    @property
    def frames(self):
        return [r.frame for r in self.rows]

    def machine_rows(self):
        proc, seg = self.owner
        return [
            f'PAGE\t{proc}\t{seg}\t{r.page_index}\t{r.vm_span.u_min}\t{r.vm_span.u_max}'
            f'\t{r.frame.u_min}\t{r.frame.u_max}'
            for r in self.rows
        ]


@dataclass
class PagingResult:
    seg_tables: dict = field(default_factory=dict)
    page_tables: dict = field(default_factory=dict)

    def add(self, seg_table, page_tables):
        self.seg_tables[seg_table.owner] = seg_table
        for pt in page_tables:
            self.page_tables[pt.owner] = pt

    def page_tables_of(self, name):
        return [pt for (owner, _), pt in self.page_tables.items() if owner == name]

    def machine_rows(self):
        rows = []
        for name, st in self.seg_tables.items():
            rows.extend(st.machine_rows())
            for pt in self.page_tables_of(name):
                rows.extend(pt.machine_rows())
        return rows
