from dataclasses import dataclass, field
from enum import Enum


class TraceOp(Enum):
    SEL = 'Sel'
    CLOSE = 'Close'
    SCHEDULE = 'Schedule'
    RESUME = 'Resume'
    IDLE = 'Idle'
    LOADED = 'Loaded'


class Attribution(Enum):
    OS = 'os'
    SELF = 'self'


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    op: TraceOp
    proc: str
    attribution: Attribution = Attribution.OS

    def line(self):
        return f'{self.tick}\t{self.op.value}\t{self.proc}\t{self.attribution.value}'


@dataclass
class SwitchTrace:
    events: list = field(default_factory=list)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def record(self, tick, op, proc, attribution=Attribution.OS):
        self.events.append(TraceEvent(tick, op, proc, attribution))

    def lines(self):
        return [e.line() for e in self.events]

    @property
    def switch_count(self):
        return sum(1 for e in self.events if e.op is TraceOp.RESUME)

    def episodes(self):
        """Split the trace into switch episodes; each starts at the Sel of the
        outgoing procedure."""
        episodes, current = [], []
        for event in self.events:
            if event.op is TraceOp.SEL and any(e.op is TraceOp.RESUME for e in current):
                episodes.append(current)
                current = []
            current.append(event)
        if current:
            episodes.append(current)
        return episodes

    def ordering_violations(self):
        """close < resume and schedule < resume, per episode."""
        found = []
        for n, episode in enumerate(self.episodes(), start=1):
            ops = [e.op for e in episode]
            for op in (TraceOp.CLOSE, TraceOp.SCHEDULE, TraceOp.RESUME):
                if op not in ops:
                    found.append(f'episode {n}: no {op.value}')
            if TraceOp.RESUME in ops:
                resume_at = ops.index(TraceOp.RESUME)
                for op in (TraceOp.CLOSE, TraceOp.SCHEDULE):
                    if op in ops and ops.index(op) > resume_at:
                        found.append(f'episode {n}: {op.value} after Resume')
        return found
