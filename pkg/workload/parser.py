"""Line-oriented workload files.

One directive per line, ``#`` starts a comment. ``proc`` lines keep file
order, which is the FCFS order of the batch.
"""
import logging
from dataclasses import dataclass

from allocators.exceptions import InvalidPolicy
from allocators.policy import AllocationPolicy
from resource_core.organize import OrgVariant
from scheduler.policies import SchedulePolicy, ScheduleVariant

from .exceptions import ParseError, ValidationError
from .forms import ProcDirectiveForm, WorkloadHeaderForm, error_summary

logger = logging.getLogger(__name__)

HEADER_DIRECTIVES = ('mem', 'vmem', 'page', 'alloc', 'policy')
PROC_KEYS = ('size', 'time', 'segs', 'prio', 'grow')


@dataclass(frozen=True)
class WorkloadSpec:
    mem_capacity: int
    vmem_capacity: int
    page_size: int
    alloc_policy: AllocationPolicy
    sched_policy: SchedulePolicy
    procedures: tuple

    @property
    def names(self):
        return [p.name for p in self.procedures]


def _proc_fields(args, line):
    if not args:
        raise ParseError('proc needs a name', line=line)
    name, *pairs = args
    if '=' in name:
        raise ParseError(f'proc needs a name before {name!r}', line=line)

    data = {'name': name}
    for pair in pairs:
        key, sep, value = pair.partition('=')
        if not sep:
            raise ParseError(f'expected key=value, got {pair!r}', line=line)
        if key not in PROC_KEYS:
            raise ParseError(f'unknown proc attribute {key!r}', line=line)
        if key in data:
            raise ParseError(f'{key} given twice', line=line)
        data[key] = value
    return data


def _tokenize(text):
    header, procs = {}, []
    for line, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].strip()
        if not content:
            continue
        directive, *args = content.split()
        if directive == 'proc':
            procs.append((line, _proc_fields(args, line)))
        elif directive in HEADER_DIRECTIVES:
            if len(args) != 1:
                raise ParseError(f'{directive} takes exactly one value', line=line)
            if directive in header:
                raise ParseError(f'{directive} given twice', line=line)
            header[directive] = (line, args[0])
        else:
            raise ParseError(f'unknown directive {directive!r}', line=line)
    return header, procs


def _check_batch(procedures, alloc, sched):
    if not procedures:
        raise ValidationError('a workload needs at least one proc')

    seen = {}
    for line, p in procedures:
        if p.name in seen:
            raise ValidationError(f'{p.name} already declared on line {seen[p.name]}', line=line)
        seen[p.name] = line

    needs_priority = (
        sched.variant is ScheduleVariant.PRIORITY
        or alloc.order.variant is OrgVariant.BY_EXTERNAL_KEY
    )
    if needs_priority:
        for line, p in procedures:
            if p.priority is None:
                raise ValidationError(f'{p.name} has no prio but the policy orders by priority', line=line)
    try:
        alloc.check_fits([p for _, p in procedures])
    except InvalidPolicy as exc:
        raise ValidationError(str(exc)) from None


def parse_workload(text):
    header, raw_procs = _tokenize(text)

    form = WorkloadHeaderForm({key: value for key, (_, value) in header.items()})
    if not form.is_valid():
        lines = [header[f][0] for f in form.errors if f in header]
        raise ValidationError(error_summary(form), line=min(lines) if lines else None)

    procedures = []
    for line, data in raw_procs:
        proc_form = ProcDirectiveForm(data)
        if not proc_form.is_valid():
            raise ValidationError(f'{data["name"]}: {error_summary(proc_form)}', line=line)
        procedures.append((line, proc_form.cleaned_data['procedure']))

    alloc, sched = form.cleaned_data['alloc'], form.cleaned_data['policy']
    _check_batch(procedures, alloc, sched)

    spec = WorkloadSpec(
        mem_capacity=form.cleaned_data['mem'],
        vmem_capacity=form.cleaned_data['vmem'],
        page_size=form.cleaned_data['page'],
        alloc_policy=alloc,
        sched_policy=sched,
        procedures=tuple(p for _, p in procedures),
    )
    logger.debug('parsed workload with %d procedures', len(spec.procedures))
    return spec


def dump_workload(spec):
    """Canonical text of ``spec``; parsing it gives back an equal spec."""
    lines = [
        f'mem {spec.mem_capacity}',
        f'vmem {spec.vmem_capacity}',
        f'page {spec.page_size}',
        f'alloc {spec.alloc_policy.descriptor}',
        f'policy {spec.sched_policy.descriptor}',
    ]
    for p in spec.procedures:
        line = f'proc {p.name} size={p.payload_size} time={p.declared_time} segs={",".join(map(str, p.seg_boundaries))}'
        if p.priority is not None:
            line += f' prio={p.priority}'
        if p.growth_schedule:
            line += f' grow={",".join(str(e) for e in p.growth_schedule)}'
        lines.append(line)
    return '\n'.join(lines) + '\n'
