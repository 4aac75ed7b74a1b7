from dataclasses import dataclass, field, replace
from enum import Enum

from pyrsistent import PBag, PSet, PVector, pbag, pset, pvector

from .exceptions import DuplicateEntry, InadmissiblePair, NotFound, RightSideTaken


class Tag(Enum):
    PROC = 'proc'
    PROCSEG = 'procseg'
    VMPAGE = 'vmpage'
    REGION = 'region'
    NAME = 'name'
    VMSEG = 'vmseg'
    FRAME = 'frame'


ADMISSIBLE = frozenset({
    (Tag.PROC, Tag.REGION),
    (Tag.PROC, Tag.NAME),
    (Tag.PROCSEG, Tag.VMSEG),
    (Tag.VMPAGE, Tag.FRAME),
})


@dataclass(frozen=True)
class Tagged:
    tag: Tag
    value: object

    def __str__(self):
        value = getattr(self.value, 'name', self.value)
        return f'{self.tag.value}:{value}'

    @classmethod
    def proc(cls, procedure):
        return cls(Tag.PROC, procedure)

    @classmethod
    def procseg(cls, span):
        return cls(Tag.PROCSEG, span)

    @classmethod
    def vmpage(cls, span):
        return cls(Tag.VMPAGE, span)

    @classmethod
    def region(cls, region):
        return cls(Tag.REGION, region)

    @classmethod
    def name(cls, name):
        return cls(Tag.NAME, name)

    @classmethod
    def vmseg(cls, region):
        return cls(Tag.VMSEG, region)

    @classmethod
    def frame(cls, region):
        return cls(Tag.FRAME, region)


@dataclass(frozen=True)
class Binding:
    left: Tagged
    right: Tagged

    def __str__(self):
        return f'({self.left}, {self.right})'


class Uniqueness(Enum):
    ONE_TO_ONE = 'one-to-one'
    MANY_TO_ONE = 'many-to-one'


@dataclass(frozen=True)
class BindingTable:
    """Bindings processed by one management predicate.

    Entries keep append order so runs replay deterministically. ``members``
    and ``right_sides`` index the entries for the uniqueness checks.
    """

    entries: PVector = field(default_factory=pvector)
    uniqueness_mode: Uniqueness = Uniqueness.ONE_TO_ONE
    members: PSet = field(default_factory=pset, repr=False)
    right_sides: PBag = field(default_factory=lambda: pbag(()), repr=False)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, binding):
        return binding in self.members

    def rights(self):
        return [b.right for b in self.entries]

    def bound_to(self, left_value):
        """Entries whose left side carries ``left_value``, in append order."""
        return [b for b in self.entries if b.left.value == left_value]

    @classmethod
    def many_to_one(cls):
        return cls(uniqueness_mode=Uniqueness.MANY_TO_ONE)


def _is_empty(value):
    return value is None or value == '' or (hasattr(value, '__len__') and len(value) == 0)


def bind(o1, o2):
    if _is_empty(o1.value) or _is_empty(o2.value):
        raise InadmissiblePair(f'cannot bind an empty side: ({o1}, {o2})')
    if (o1.tag, o2.tag) not in ADMISSIBLE:
        raise InadmissiblePair(f'{o1.tag.value} cannot be bound to {o2.tag.value}')
    return Binding(o1, o2)


def unbind_fst(b):
    return b.left


def unbind_snd(b):
    return b.right


def append(table, b):
    if b in table.members:
        raise DuplicateEntry(f'{b} already in table')
    if table.uniqueness_mode is Uniqueness.ONE_TO_ONE and b.right in table.right_sides:
        raise RightSideTaken(f'{b.right} is already bound')
    return replace(
        table,
        entries=table.entries.append(b),
        members=table.members.add(b),
        right_sides=table.right_sides.add(b.right),
    )


def remove(table, b):
    if b not in table.members:
        raise NotFound(f'{b} not in table')
    return replace(
        table,
        entries=table.entries.remove(b),
        members=table.members.remove(b),
        right_sides=table.right_sides.remove(b.right),
    )
