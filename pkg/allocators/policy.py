from dataclasses import dataclass
from enum import Enum

from resource_core.organize import OrgSpec, OrgVariant

from .exceptions import InvalidPolicy


class Partitioning(Enum):
    VARIABLE = 'variable'
    FIXED = 'fixed'


ORDER_DESCRIPTORS = {
    'fcfs': OrgSpec.identity(),
    'ssf': OrgSpec.ascending(),
    'prio': OrgSpec.by_key('priority'),
}


@dataclass(frozen=True)
class AllocationPolicy:
    """Org over P plus the partitioning scheme over M.

    identity order is first-come-first-serve, ascending size is
    shortest-size-first, the priority key gives priority allocation. Fixed
    partitioning is a constant Org over memory.
    """

    order: OrgSpec = OrgSpec.identity()
    partitioning: Partitioning = Partitioning.VARIABLE
    partition_size: int = None

    def __post_init__(self):
        if self.partitioning is Partitioning.FIXED and (self.partition_size or 0) < 1:
            raise InvalidPolicy('fixed partitioning needs a partition size >= 1')

    @classmethod
    def from_descriptor(cls, text):
        text = text.strip().lower()
        if text.startswith('fixed:'):
            try:
                size = int(text.split(':', 1)[1])
            except ValueError:
                raise InvalidPolicy(f'bad partition size in {text!r}') from None
            return cls(partitioning=Partitioning.FIXED, partition_size=size)
        if text not in ORDER_DESCRIPTORS:
            raise InvalidPolicy(f'unknown allocation policy {text!r}')
        return cls(order=ORDER_DESCRIPTORS[text])

    @property
    def descriptor(self):
        if self.partitioning is Partitioning.FIXED:
            return f'fixed:{self.partition_size}'
        for name, spec in ORDER_DESCRIPTORS.items():
            if spec == self.order:
                return name
        return self.order.variant.value

    def region_size(self, procedure):
        if self.partitioning is Partitioning.FIXED:
            return self.partition_size
        return procedure.payload_size

    def order_keys(self, procs):
        if self.order.variant is OrgVariant.BY_EXTERNAL_KEY:
            return {p: getattr(p, self.order.key_name, None) for p in procs}
        return None

    def check_fits(self, procs):
        if self.partitioning is Partitioning.FIXED:
            too_big = [p.name for p in procs if p.payload_size > self.partition_size]
            if too_big:
                raise InvalidPolicy(
                    f'partition size {self.partition_size} is smaller than {", ".join(too_big)}'
                )
