from dataclasses import dataclass

from resource_core.regions import AddressSpace

from .exceptions import InvalidProcedure


@dataclass(frozen=True)
class GrowthEvent:
    """After ``at_tick`` ticks of execution the procedure's memory need
    changes by ``delta`` units."""

    at_tick: int
    delta: int

    def __str__(self):
        return f'{self.at_tick}:{self.delta}'


def check_boundaries(name, size, bounds):
    if len(bounds) < 2 or bounds[0] != 0 or bounds[-1] != size:
        raise InvalidProcedure(f'{name}: segment boundaries must start at 0 and end at size {size}')
    if any(a >= b for a, b in zip(bounds, bounds[1:])):
        raise InvalidProcedure(f'{name}: segment boundaries must be strictly increasing')


@dataclass(frozen=True)
class Procedure:
    """A named finite set of naturals, as handed to the OS.

    ``declared_time`` is an estimate supplied by the workload: the real
    temporal cardinality is undecidable in general.
    """

    name: str
    payload_size: int
    declared_time: int
    seg_boundaries: tuple = None
    priority: int = None
    growth_schedule: tuple = ()

    def __post_init__(self):
        if not self.name:
            raise InvalidProcedure('procedure needs a name')
        if self.payload_size < 1:
            raise InvalidProcedure(f'{self.name}: size must be >= 1')
        if self.declared_time < 1:
            raise InvalidProcedure(f'{self.name}: time must be >= 1')

        bounds = (0, self.payload_size) if self.seg_boundaries is None else tuple(self.seg_boundaries)
        object.__setattr__(self, 'seg_boundaries', bounds)
        object.__setattr__(self, 'growth_schedule', tuple(self.growth_schedule))

        check_boundaries(self.name, self.payload_size, bounds)
        if self.priority is not None and self.priority < 0:
            raise InvalidProcedure(f'{self.name}: priority must be a natural')
        self._check_growth()

    def _check_growth(self):
        size, last_tick = self.payload_size, 0
        for event in self.growth_schedule:
            if not 1 <= event.at_tick <= self.declared_time - 1:
                raise InvalidProcedure(
                    f'{self.name}: growth tick {event.at_tick} outside 1..{self.declared_time - 1}'
                )
            if event.at_tick < last_tick:
                raise InvalidProcedure(f'{self.name}: growth schedule must be ordered by tick')
            size += event.delta
            if size < 1:
                raise InvalidProcedure(f'{self.name}: growth at tick {event.at_tick} drops size below 1')
            last_tick = event.at_tick

    def __str__(self):
        return self.name

    @property
    def size(self):
        return self.payload_size

    @property
    def segment_count(self):
        return len(self.seg_boundaries) - 1

    def address_space(self):
        return AddressSpace(self.name, self.payload_size)

    def growth_at(self, tick):
        return [e for e in self.growth_schedule if e.at_tick == tick]
