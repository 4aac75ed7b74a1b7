import logging

from django.template.loader import render_to_string
from tabulate import tabulate

from binding_glue.bindings import unbind_fst, unbind_snd

logger = logging.getLogger(__name__)

SECTIONS = {
    'tables': ('tables',),
    'trace': ('trace',),
    'all': ('tables', 'trace'),
}


def _pairs(table):
    return [(unbind_fst(b).value, unbind_snd(b).value) for b in table]


def table_rows(report):
    rows = [f'PID\t{p.name}\t{pid}' for p, pid in _pairs(report.names)]
    rows += [f'ALLOC\t{p.name}\t{r.u_min}\t{r.u_max}' for p, r in _pairs(report.allocation)]
    rows += report.paging.machine_rows()
    rows += [f'SLICE\t{p.name}\t{r.u_min}\t{r.u_max}' for p, r in _pairs(report.schedule)]
    rows.append(
        f'SUMMARY\twaste={report.fragmentation_waste}\tswitches={report.switch_count}'
        f'\tticks={report.total_ticks}'
    )
    return rows


def machine_lines(report, sections='all', audit=False):
    lines = []
    if 'tables' in SECTIONS[sections]:
        lines += table_rows(report)
    if 'trace' in SECTIONS[sections]:
        lines += report.trace.lines()
    if audit:
        lines += [a.line() for a in report.audits]
    return lines


def _table(headers, rows):
    cells = [[str(c) for c in row] for row in rows]
    return tabulate(cells, headers=headers, tablefmt='simple', disable_numparse=True)


def human_context(report, sections='all', audit=False):
    shown = SECTIONS[sections]
    spec = report.spec
    context = {
        'spec': spec,
        'options': report.options,
        'report': report,
        'show_tables': 'tables' in shown,
        'show_trace': 'trace' in shown,
        'show_audit': audit,
    }
    if context['show_tables']:
        context['procedures'] = _table(
            ('proc', 'pid', 'size', 'time', 'prio', 'segments'),
            [
                (p.name, pid, p.payload_size, p.declared_time,
                 '-' if p.priority is None else p.priority, p.segment_count)
                for p, pid in _pairs(report.names)
            ],
        )
        context['allocation'] = _table(
            ('proc', 'region'), [(p.name, r) for p, r in _pairs(report.allocation)]
        )
        context['segments'] = _table(
            ('proc', 'seg', 'logical', 'virtual'),
            [
                (st.owner, row.seg_index, row.proc_span, row.vm_span)
                for st in report.paging.seg_tables.values() for row in st.rows
            ],
        )
        context['pages'] = _table(
            ('proc', 'seg', 'page', 'virtual', 'frame'),
            [
                (proc, seg, row.page_index, row.vm_span, row.frame)
                for (proc, seg), pt in report.paging.page_tables.items() for row in pt.rows
            ],
        )
        context['slices'] = _table(
            ('proc', 'interval'), [(p.name, r) for p, r in _pairs(report.schedule)]
        )
    if context['show_trace']:
        context['trace'] = _table(
            ('tick', 'op', 'proc', 'by'),
            [(e.tick, e.op.value, e.proc, e.attribution.value) for e in report.trace],
        )
    if audit:
        context['audits'] = _table(
            ('pool', 'phase', 'result', 'findings'),
            [
                (a.pool, a.phase, 'PASS' if a.passed else 'FAIL', '; '.join(a.report.violations))
                for a in report.audits
            ],
        )
    return context


def render(report, fmt='human', sections='all', audit=False):
    if fmt == 'machine':
        return ''.join(f'{line}\n' for line in machine_lines(report, sections, audit))
    return render_to_string('workload/report.txt', human_context(report, sections, audit))


def emit(report, fmt, destination, sections='all', audit=False):
    """Write the report to ``destination`` (anything with ``write``).

    IO errors from the destination are not caught.
    """
    text = render(report, fmt, sections, audit)
    destination.write(text)
    logger.debug('emitted %d characters (%s, %s)', len(text), fmt, sections)
