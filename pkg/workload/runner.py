"""Runs a parsed workload end to end.

Phases, in order: naming, paging (segmentation over vmem, paging over the
physical pool), allocation (contiguous regions over a separate memory pool)
and scheduling (CPU time, growth and release at completion). Every pool a
phase touched is audited when the phase ends, whether it succeeded or not.
"""
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field

from django.conf import settings

from allocators.allocate import allocate_all, apply_growth, free_procedure, internal_fragmentation
from binding_glue.bindings import BindingTable
from binding_glue.names import NamePool, assign_names
from paging_segmentation.pipeline import do_page_seg
from paging_segmentation.tables import PagingConfig, PagingResult
from resource_core.audit import audit_partition
from resource_core.exceptions import ModelError
from resource_core.pools import memory_pool, time_pool, virtual_memory_pool
from scheduler.simulation import Multitasking, Scheduler
from scheduler.trace import SwitchTrace

from .exceptions import AuditFailure

logger = logging.getLogger(__name__)

PHASES = ('naming', 'paging', 'allocation', 'scheduling')


@dataclass(frozen=True)
class RunOptions:
    hoist_frames: bool = False
    multitasking: Multitasking = Multitasking.PREEMPTIVE

    @classmethod
    def from_settings(cls, hoist_frames=None, multitasking=None):
        """Defaults from ``settings.OSMODEL``; ``None`` keeps the default."""
        if hoist_frames is None:
            hoist_frames = settings.OSMODEL['HOIST_FRAMES']
        if multitasking is None:
            multitasking = settings.OSMODEL['MULTITASKING']
        return cls(bool(hoist_frames), Multitasking(multitasking))


@dataclass(frozen=True)
class PoolAudit:
    pool: str
    phase: str
    report: object

    @property
    def passed(self):
        return self.report.passed

    def line(self):
        return f'AUDIT\t{self.pool}\t{self.phase}\t{"PASS" if self.passed else "FAIL"}'


@dataclass
class RunReport:
    spec: object
    options: RunOptions
    names: BindingTable = field(default_factory=BindingTable)
    paging: PagingResult = field(default_factory=PagingResult)
    allocation: BindingTable = field(default_factory=BindingTable)
    schedule: BindingTable = field(default_factory=BindingTable)
    trace: SwitchTrace = field(default_factory=SwitchTrace)
    audits: list = field(default_factory=list)
    fragmentation_waste: int = 0
    switch_count: int = 0
    total_ticks: int = 0

    @property
    def audits_passed(self):
        return all(a.passed for a in self.audits)


class WorkloadRunner:
    def __init__(self, spec, options=None):
        self.spec = spec
        self.options = options or RunOptions.from_settings()
        self.report = RunReport(spec, self.options)
        self.procs = list(spec.procedures)

    @contextmanager
    def phase(self, name, **pools):
        logger.info('phase %s started', name)
        try:
            yield
        except ModelError as exc:
            self._audit(name, pools)
            exc.with_phase(name)
            exc.report = self.report
            logger.warning('phase %s failed: %s', name, exc)
            raise
        failed = [a for a in self._audit(name, pools) if not a.passed]
        if failed:
            findings = '; '.join(v for a in failed for v in a.report.violations)
            raise AuditFailure(f'{name}: {findings}', pools=[a.pool for a in failed]).with_phase(name)
        logger.info('phase %s finished', name)

    def _audit(self, phase, pools):
        audits = [PoolAudit(label, phase, audit_partition(pool)) for label, pool in pools.items()]
        self.report.audits.extend(audits)
        return audits

    def run(self):
        spec, report = self.spec, self.report

        with self.phase('naming'):
            report.names = assign_names(self.procs, NamePool.process_ids(len(self.procs)))

        config = PagingConfig(spec.page_size, spec.vmem_capacity, spec.mem_capacity, self.options.hoist_frames)
        vm, phys = virtual_memory_pool(config.vm_capacity), memory_pool(config.phys_capacity)
        with self.phase('paging', vmem=vm, mem=phys):
            report.paging = do_page_seg(
                self.procs, vm, phys, config.page_size,
                hoist_frames=config.hoist_frames,
                order=spec.alloc_policy.order,
                keys=spec.alloc_policy.order_keys(self.procs),
            )

        memory = memory_pool(spec.mem_capacity)
        with self.phase('allocation', mem=memory):
            report.allocation = allocate_all(self.procs, memory, spec.alloc_policy)
            report.fragmentation_waste = internal_fragmentation(self.procs, spec.alloc_policy)

        time = time_pool()
        live = {'table': report.allocation}

        def on_tick(p, executed, tick):
            for event in p.growth_at(executed):
                live['table'] = apply_growth(p, event, memory, live['table'])
            if executed == p.declared_time:
                live['table'] = free_procedure(p, memory, live['table'])

        with self.phase('scheduling', mem=memory, time=time):
            scheduler = Scheduler(time, mode=self.options.multitasking)
            report.trace = scheduler.run(self.procs, spec.sched_policy, on_tick=on_tick)
            report.schedule = scheduler.table
            report.switch_count = report.trace.switch_count
            report.total_ticks = scheduler.clock

        logger.info(
            'run finished: %d switches, %d ticks, waste %d',
            report.switch_count, report.total_ticks, report.fragmentation_waste,
        )
        return report


def run(spec, options=None):
    return WorkloadRunner(spec, options).run()
