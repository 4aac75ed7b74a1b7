from collections import deque, namedtuple
from dataclasses import dataclass
from enum import Enum

from allocators.exceptions import InvalidPolicy
from resource_core.organize import OrgSpec, organize

from .exceptions import MissingPriority

Slice = namedtuple('Slice', ['proc', 'length'])


class ScheduleVariant(Enum):
    FCFS = 'fcfs'
    SHORTEST_JOB_FIRST = 'sjf'
    PRIORITY = 'prio'
    ROUND_ROBIN = 'rr'


@dataclass(frozen=True)
class SchedulePolicy:
    variant: ScheduleVariant = ScheduleVariant.FCFS
    quantum: int = None

    def __post_init__(self):
        if self.variant is ScheduleVariant.ROUND_ROBIN and (self.quantum or 0) < 1:
            raise InvalidPolicy('round robin needs a quantum >= 1')

    @classmethod
    def fcfs(cls):
        return cls(ScheduleVariant.FCFS)

    @classmethod
    def sjf(cls):
        return cls(ScheduleVariant.SHORTEST_JOB_FIRST)

    @classmethod
    def priority(cls):
        return cls(ScheduleVariant.PRIORITY)

    @classmethod
    def round_robin(cls, quantum):
        return cls(ScheduleVariant.ROUND_ROBIN, quantum)

    @classmethod
    def from_descriptor(cls, text):
        text = text.strip().lower()
        if text.startswith('rr:'):
            try:
                return cls.round_robin(int(text.split(':', 1)[1]))
            except ValueError:
                raise InvalidPolicy(f'bad quantum in {text!r}') from None
        try:
            variant = ScheduleVariant(text)
        except ValueError:
            raise InvalidPolicy(f'unknown scheduling policy {text!r}') from None
        if variant is ScheduleVariant.ROUND_ROBIN:
            raise InvalidPolicy('round robin needs a quantum, e.g. rr:2')
        return cls(variant)

    @property
    def descriptor(self):
        if self.variant is ScheduleVariant.ROUND_ROBIN:
            return f'rr:{self.quantum}'
        return self.variant.value


def _ordered(procs, policy):
    if policy.variant is ScheduleVariant.SHORTEST_JOB_FIRST:
        return organize(procs, OrgSpec.by_key('declared_time'), {p: p.declared_time for p in procs})
    if policy.variant is ScheduleVariant.PRIORITY:
        missing = [p.name for p in procs if p.priority is None]
        if missing:
            raise MissingPriority(f'no priority for {", ".join(missing)}')
        # lower value runs first
        return organize(procs, OrgSpec.by_key('priority'), {p: p.priority for p in procs})
    return organize(procs, OrgSpec.identity())


def build_schedule(procs, policy):
    """The run plan as a list of (procedure, slice length).

    Non-preemptive policies give each procedure one slice of its declared
    time. Round robin chops T into constant quanta and cycles the queue.
    """
    ordered = _ordered(procs, policy)
    if policy.variant is not ScheduleVariant.ROUND_ROBIN:
        return [Slice(p, p.declared_time) for p in ordered]

    plan = []
    queue = deque((p, p.declared_time) for p in ordered)
    while queue:
        p, remaining = queue.popleft()
        run = min(policy.quantum, remaining)
        plan.append(Slice(p, run))
        if remaining > run:
            queue.append((p, remaining - run))
    return plan
