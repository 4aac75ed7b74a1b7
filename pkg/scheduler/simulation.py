import logging
from enum import Enum

from django.conf import settings

from binding_glue.bindings import BindingTable, Tagged, append, bind
from resource_core.organize import select
from resource_core.pools import make_set, time_pool
from resource_core.regions import ResourceKind

from .environment import Environment, close_proc, resume_proc, schedule_next
from .policies import build_schedule
from .trace import Attribution, SwitchTrace, TraceOp

logger = logging.getLogger(__name__)


class Multitasking(Enum):
    PREEMPTIVE = 'preemptive'
    COOPERATIVE = 'cooperative'


def default_null_proc():
    return settings.OSMODEL['NULL_PROCEDURE']


def default_multitasking():
    return Multitasking(settings.OSMODEL['MULTITASKING'])


def carve_interval(time, r):
    """Mint the next ``r`` ticks of T. Cannot fail: T is consumable and
    infinite."""
    if time.kind is not ResourceKind.TIME:
        raise TypeError(f'carve_interval needs the time pool, got {time.kind}')
    return make_set(time, r)


def switch(procs, i_cur, i_next, env, trace, tick=0, mode=Multitasking.PREEMPTIVE):
    """Sel ; close ; Sel ; schedule ; resume.

    ``procs`` is the indexed set with the null procedure at index 0. In
    cooperative mode the outgoing procedure performs its own Sel and close.
    """
    outgoing = select(procs, i_cur + 1)
    own = mode is Multitasking.COOPERATIVE and outgoing != env.null_proc
    out_attrib = Attribution.SELF if own else Attribution.OS

    env = close_proc(env, outgoing)
    trace.record(tick, TraceOp.SEL, outgoing, out_attrib)
    trace.record(tick, TraceOp.CLOSE, outgoing, out_attrib)

    incoming = select(procs, i_next + 1)
    closure = schedule_next(env, incoming)
    trace.record(tick, TraceOp.SEL, incoming)
    trace.record(tick, TraceOp.SCHEDULE, incoming)

    trace.record(tick, TraceOp.RESUME, incoming)
    return resume_proc(env, closure, trace=trace, tick=tick)


class Scheduler:
    """Drives CPU-time allocation for one batch of procedures.

    ``table`` binds every carved CPU interval to the procedure it was
    scheduled for.
    """

    def __init__(self, time=None, null_proc=None, mode=None):
        self.time = time if time is not None else time_pool()
        self.mode = mode or default_multitasking()
        null_proc = null_proc or default_null_proc()
        self.env = Environment.initial(null_proc)
        self.procs = [null_proc]
        self.table = BindingTable()
        self.trace = SwitchTrace()

    @property
    def clock(self):
        return self.time.next_fresh

    def admit(self, procs):
        self.env = self.env.admit(procs)
        self.procs.extend(p.name for p in procs)

    def switch_to(self, name):
        i_cur, i_next = self.procs.index(self.env.current), self.procs.index(name)
        self.env = switch(self.procs, i_cur, i_next, self.env, self.trace, self.clock, self.mode)

    def carve(self, p, r):
        interval = carve_interval(self.time, r)
        self.table = append(self.table, bind(Tagged.proc(p), Tagged.region(interval)))
        self.env = self.env.bind_interval(p.name, interval)
        return interval

    def run(self, procs, policy, on_tick=None):
        """Run every procedure to completion under ``policy``.

        ``on_tick(procedure, executed, tick)`` is called after each tick a
        procedure executes.
        """
        plan = build_schedule(procs, policy)
        self.admit(procs)
        for p, length in plan:
            self.switch_to(p.name)
            interval = self.carve(p, length)
            for tick in range(interval.u_min, interval.u_max + 1):
                self.env = self.env.consume(p.name)
                if on_tick is not None:
                    on_tick(p, p.declared_time - self.env.remaining[p.name], tick)
        if plan:
            self.switch_to(self.env.null_proc)
        logger.debug('ran %d slices, %d switches, %d ticks', len(plan), self.trace.switch_count, self.clock)
        return self.trace


def run_simulation(procs, policy, time, mode=None, on_tick=None):
    return Scheduler(time, mode=mode).run(procs, policy, on_tick=on_tick)
