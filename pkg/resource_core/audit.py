from dataclasses import dataclass, field


@dataclass
class AuditReport:
    checked_pool: object
    total_ok: bool = True
    exclusivity_ok: bool = True
    union_ok: bool = True
    disjoint_ok: bool = True
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def fail(self, check, finding):
        setattr(self, f'{check}_ok', False)
        self.violations.append(f'{check}: {finding}')


def _merge(regions):
    """Union of regions as sorted, non-touching (lo, hi) runs."""
    runs = []
    for r in sorted(regions, key=lambda r: r.u_min):
        if runs and r.u_min <= runs[-1][1] + 1:
            runs[-1][1] = max(runs[-1][1], r.u_max)
        else:
            runs.append([r.u_min, r.u_max])
    return [tuple(run) for run in runs]


def _overlapping_pairs(labelled):
    """Sweep (label, region) pairs by start address and yield every
    overlapping pair once."""
    active = []
    for label, region in sorted(labelled, key=lambda lr: (lr[1].u_min, lr[1].u_max)):
        active = [(l, a) for l, a in active if a.u_max >= region.u_min]
        for other in active:
            yield other, (label, region)
        active.append((label, region))


def audit_partition(pool):
    """Check the four partition invariants of ``pool`` and report findings.

    total:       sizes of both ledgers sum to the capacity (finite pools)
    exclusivity: no address is both free and occupied
    union:       free and occupied together cover exactly the issued addresses
    disjoint:    regions inside each ledger are pairwise disjoint
    """
    report = AuditReport(checked_pool=pool.kind)
    free = list(pool.free_ledger)
    occupied = list(pool.occupied_ledger)

    if pool.finite:
        total = sum(r.size for r in free) + sum(r.size for r in occupied)
        if total != pool.capacity:
            report.fail('total', f'ledger sizes sum to {total}, capacity is {pool.capacity}')

    labelled = [('free', r) for r in free] + [('occupied', r) for r in occupied]
    for (la, a), (lb, b) in _overlapping_pairs(labelled):
        if la != lb:
            lo, hi = max(a.u_min, b.u_min), min(a.u_max, b.u_max)
            report.fail('exclusivity', f'addresses {lo}..{hi} are both free and occupied ({a}, {b})')
        else:
            report.fail('disjoint', f'{la} regions {a} and {b} overlap')

    universe_hi = (pool.capacity if pool.finite else pool.next_fresh) - 1
    expected = [(0, universe_hi)] if universe_hi >= 0 else []
    covered = _merge(free + occupied)
    if covered != expected:
        report.fail('union', f'ledgers cover {covered}, expected {expected}')

    return report
