from dataclasses import dataclass, field, replace

from pyrsistent import PMap, pmap

from .exceptions import NoClosure, NotCurrent
from .trace import TraceOp


@dataclass(frozen=True)
class Closure:
    """Stored snapshot of a suspended procedure."""

    owner: str
    remaining_time: int
    bound_regions: tuple = ()
    resume_count: int = 0


@dataclass(frozen=True)
class Environment:
    """State the switch operators read and rewrite.

    ``closures`` holds the stored snapshots, ``remaining`` and ``regions`` the
    live state of admitted procedures. The null procedure always has a closure
    and never consumes anything.
    """

    null_proc: str
    current: str
    closures: PMap = field(default_factory=pmap)
    remaining: PMap = field(default_factory=pmap)
    regions: PMap = field(default_factory=pmap)

    @classmethod
    def initial(cls, null_proc):
        return cls(null_proc, null_proc, pmap({null_proc: Closure(null_proc, 0)}))

    @property
    def idle(self):
        return self.current == self.null_proc

    def admit(self, procs):
        """Initial closures: full declared time, nothing bound yet."""
        return replace(
            self,
            closures=self.closures.update({p.name: Closure(p.name, p.declared_time) for p in procs}),
            remaining=self.remaining.update({p.name: p.declared_time for p in procs}),
        )

    def consume(self, name, ticks=1):
        return replace(self, remaining=self.remaining.set(name, self.remaining[name] - ticks))

    def bind_interval(self, name, interval):
        return replace(self, regions=self.regions.set(name, self.regions.get(name, ()) + (interval,)))


def close_proc(env, p):
    if p != env.current:
        raise NotCurrent(f'{p} is not running (current is {env.current})')
    previous = env.closures.get(p)
    closure = Closure(
        owner=p,
        remaining_time=env.remaining.get(p, 0),
        bound_regions=env.regions.get(p, ()),
        resume_count=previous.resume_count if previous else 0,
    )
    return replace(env, closures=env.closures.set(p, closure))


def schedule_next(env, p):
    try:
        return env.closures[p]
    except KeyError:
        raise NoClosure(f'no stored closure for {p}') from None


def transition_marker(env, incoming):
    """Idle when the null procedure takes over from a user procedure, Loaded
    for the reverse."""
    if incoming == env.null_proc and env.current != env.null_proc:
        return TraceOp.IDLE
    if incoming != env.null_proc and env.current == env.null_proc:
        return TraceOp.LOADED
    return None


def resume_proc(env, c, trace=None, tick=0):
    marker = transition_marker(env, c.owner)
    if marker and trace is not None:
        trace.record(tick, marker, c.owner)

    resumed = replace(c, resume_count=c.resume_count + 1)
    remaining, regions = env.remaining, env.regions
    if c.owner != env.null_proc:
        remaining = remaining.set(c.owner, c.remaining_time)
        regions = regions.set(c.owner, c.bound_regions)
    return replace(
        env,
        current=c.owner,
        closures=env.closures.set(c.owner, resumed),
        remaining=remaining,
        regions=regions,
    )
