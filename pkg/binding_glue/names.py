import logging
from dataclasses import dataclass, field
from enum import Enum

from sortedcontainers import SortedSet

from .bindings import BindingTable, Tagged, append, bind
from .exceptions import NamesExhausted

logger = logging.getLogger(__name__)


class NameKind(Enum):
    PROCESS_IDS = 'pid'
    FILE_NAMES = 'file'


@dataclass
class NamePool:
    kind: NameKind
    available: SortedSet = field(default_factory=SortedSet)
    issued: set = field(default_factory=set)

    def __post_init__(self):
        self.available = SortedSet(self.available)
        self.issued = set(self.issued)

    @classmethod
    def process_ids(cls, count, start=1):
        return cls(NameKind.PROCESS_IDS, range(start, start + count))

    @classmethod
    def file_names(cls, names):
        return cls(NameKind.FILE_NAMES, names)

    def lowest(self):
        return self.available[0]


def assign_names(procs, names, unique=True):
    """Bind a name to every procedure, in order, lowest available name first.

    With ``unique`` every bound name leaves the pool (one-to-one); without it
    names are not removed and may repeat (many-to-one). The pool is only
    changed once every procedure has a name.
    """
    needed = len(procs) if unique else min(len(procs), 1)
    if len(names.available) < needed:
        p = procs[len(names.available)]
        raise NamesExhausted(f'no {names.kind.value} left for {p.name}', procedure=p.name)

    table = BindingTable() if unique else BindingTable.many_to_one()
    if unique:
        chosen = list(names.available[:len(procs)])
    else:
        chosen = [names.lowest()] * len(procs) if procs else []
    for p, n in zip(procs, chosen):
        table = append(table, bind(Tagged.proc(p), Tagged.name(n)))
    if unique:
        for n in chosen:
            names.available.remove(n)
        names.issued.update(chosen)
    logger.debug('named %d procedures (%s)', len(table), 'unique' if unique else 'shared')
    return table
