import json
import math
import shutil
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from django.urls import reverse

from resource_core.audit import AuditReport
from resource_core.exceptions import Exhausted
from scheduler.simulation import Multitasking
from scheduler.trace import TraceOp

from .emit import emit, human_context, machine_lines, render
from .exceptions import AuditFailure, ParseError, ValidationError
from .models import WorkloadRun
from .parser import dump_workload, parse_workload
from .runner import RunOptions, run

FIXTURES = Path(__file__).resolve().parent / 'fixtures'
W1_TEXT = (FIXTURES / 'w1.workload').read_text(encoding='utf-8')
W1_TABLES = (FIXTURES / 'w1_tables.golden').read_text(encoding='utf-8')
W1_TRACE = (FIXTURES / 'w1_trace.golden').read_text(encoding='utf-8')

HEADER = 'mem 32\nvmem 64\npage 4\n'

GROWING = HEADER + (
    'alloc ssf\n'
    'policy rr:2\n'
    'proc a size=6 time=4 segs=0,2,6 grow=1:3,3:-5\n'
    'proc b size=3 time=3 segs=0,3 prio=1 grow=2:2\n'
    'proc c size=9 time=2 segs=0,4,8,9\n'
)


def forced_failure(pool):
    report = AuditReport(pool.kind)
    report.fail('total', 'forced')
    return report


class ParseWorkloadTests(SimpleTestCase):
    def test_single_procedure(self):
        spec = parse_workload(HEADER + 'policy rr:1\nproc p1 size=5 time=3 segs=0,5\n')
        self.assertEqual((spec.mem_capacity, spec.vmem_capacity, spec.page_size), (32, 64, 4))
        self.assertEqual(spec.sched_policy.descriptor, 'rr:1')
        self.assertEqual(spec.alloc_policy.descriptor, 'fcfs')
        self.assertEqual(spec.names, ['p1'])
        self.assertEqual(spec.procedures[0].seg_boundaries, (0, 5))

    def test_proc_order_is_file_order(self):
        self.assertEqual(parse_workload(GROWING).names, ['a', 'b', 'c'])

    def test_comments_and_blank_lines(self):
        spec = parse_workload('# header\n\n' + HEADER + 'proc p1 size=1 time=1 segs=0,1  # tiny\n')
        self.assertEqual(spec.names, ['p1'])

    def test_unknown_directive_reports_line(self):
        with self.assertRaises(ParseError) as ctx:
            parse_workload('mem 32\nvmem 64\npagee 4\n')
        self.assertEqual(ctx.exception.line, 3)
        self.assertIn('pagee', str(ctx.exception))

    def test_malformed_attribute(self):
        with self.assertRaises(ParseError) as ctx:
            parse_workload(HEADER + 'proc p1 size5 time=1 segs=0,5\n')
        self.assertEqual(ctx.exception.line, 4)
        with self.assertRaises(ParseError):
            parse_workload(HEADER + 'proc p1 size=5 colour=red\n')
        with self.assertRaises(ParseError):
            parse_workload(HEADER + 'mem 16\n')

    def test_boundaries_must_end_at_size(self):
        with self.assertRaises(ValidationError) as ctx:
            parse_workload(HEADER + 'proc p1 size=5 segs=0,4\n')
        self.assertIn('end at size 5', str(ctx.exception))
        self.assertEqual(ctx.exception.line, 4)

    def test_field_validation(self):
        cases = [
            HEADER + 'proc p1 size=0 time=1 segs=0,0\n',
            HEADER + 'proc p1 size=x time=1 segs=0,1\n',
            HEADER + 'proc p0 size=1 time=1 segs=0,1\n',
            HEADER + 'proc p1 size=4 time=2 segs=0,4 grow=5:1\n',
            HEADER + 'proc p1 size=4 time=2 segs=0,4\nproc p1 size=4 time=2 segs=0,4\n',
            HEADER + 'policy prio\nproc p1 size=4 time=2 segs=0,4\n',
            HEADER + 'policy lottery\nproc p1 size=4 time=2 segs=0,4\n',
            HEADER + 'alloc fixed:2\nproc p1 size=4 time=2 segs=0,4\n',
            'mem 30\nvmem 64\npage 4\nproc p1 size=4 time=2 segs=0,4\n',
            'vmem 64\npage 4\nproc p1 size=4 time=2 segs=0,4\n',
            HEADER,
        ]
        for text in cases:
            with self.subTest(text=text), self.assertRaises(ValidationError):
                parse_workload(text)

    def test_canonical_dump_round_trips(self):
        for text in (W1_TEXT, GROWING, HEADER + 'alloc fixed:8\npolicy prio\nproc x size=2 time=1 segs=0,2 prio=0\n'):
            spec = parse_workload(text)
            self.assertEqual(parse_workload(dump_workload(spec)), spec)
            self.assertEqual(dump_workload(parse_workload(dump_workload(spec))), dump_workload(spec))


class RunTests(SimpleTestCase):
    def setUp(self):
        self.spec = parse_workload(W1_TEXT)
        self.options = RunOptions()

    def test_w1_tables_and_trace(self):
        report = run(self.spec, self.options)
        self.assertEqual(render(report, 'machine', 'tables'), W1_TABLES)
        self.assertEqual(render(report, 'machine', 'trace'), W1_TRACE)

    def test_w1_hoisted_gives_same_tables(self):
        report = run(self.spec, RunOptions(hoist_frames=True))
        self.assertEqual(render(report, 'machine', 'tables'), W1_TABLES)

    def test_every_phase_audited(self):
        report = run(self.spec, self.options)
        self.assertTrue(report.audits_passed)
        self.assertEqual(
            [(a.pool, a.phase) for a in report.audits],
            [('vmem', 'paging'), ('mem', 'paging'), ('mem', 'allocation'), ('mem', 'scheduling'), ('time', 'scheduling')],
        )
        self.assertEqual(
            machine_lines(report, 'tables', audit=True)[-5:],
            [f'AUDIT\t{a.pool}\t{a.phase}\tPASS' for a in report.audits],
        )

    def test_too_little_memory_fails_in_paging_with_clean_pools(self):
        spec = parse_workload(W1_TEXT.replace('mem 32', 'mem 8'))
        with self.assertRaises(Exhausted) as ctx:
            run(spec, self.options)
        self.assertEqual(ctx.exception.phase, 'paging')
        audits = ctx.exception.report.audits
        self.assertEqual(len(audits), 2)
        self.assertTrue(all(a.passed for a in audits))

    def test_audit_failure(self):
        with mock.patch('workload.runner.audit_partition', forced_failure):
            with self.assertRaises(AuditFailure) as ctx:
                run(self.spec, self.options)
        self.assertEqual(ctx.exception.phase, 'paging')

    def test_deterministic(self):
        for text in (W1_TEXT, GROWING):
            spec = parse_workload(text)
            first = render(run(spec, self.options), 'machine', 'all', audit=True)
            second = render(run(spec, self.options), 'machine', 'all', audit=True)
            self.assertEqual(first, second)

    def test_line_counts(self):
        spec = parse_workload(GROWING)
        report = run(spec, self.options)
        lines = machine_lines(report)
        segs = sum(p.segment_count for p in spec.procedures)
        pages = sum(
            math.ceil((p.seg_boundaries[i + 1] - p.seg_boundaries[i]) / spec.page_size)
            for p in spec.procedures for i in range(p.segment_count)
        )
        markers = sum(1 for e in report.trace if e.op in (TraceOp.IDLE, TraceOp.LOADED))
        self.assertEqual(sum(1 for line in lines if line.startswith('SEG\t')), segs)
        self.assertEqual(sum(1 for line in lines if line.startswith('PAGE\t')), pages)
        self.assertEqual(len(report.trace), 5 * report.switch_count + markers)

    def test_growth_and_release_keep_memory_partitioned(self):
        report = run(parse_workload(GROWING), self.options)
        self.assertTrue(report.audits_passed)
        self.assertEqual(report.total_ticks, 9)
        self.assertEqual(
            [line for line in machine_lines(report, 'tables') if line.startswith('ALLOC\t')],
            ['ALLOC\tb\t0\t2', 'ALLOC\ta\t3\t8', 'ALLOC\tc\t9\t17'],
        )

    def test_fixed_partition_waste(self):
        report = run(parse_workload(W1_TEXT.replace('alloc fcfs', 'alloc fixed:8')), self.options)
        self.assertEqual(report.fragmentation_waste, 4)
        self.assertIn('SUMMARY\twaste=4\tswitches=6\tticks=5', machine_lines(report, 'tables'))

    def test_cooperative_attribution(self):
        report = run(self.spec, RunOptions(multitasking=Multitasking.COOPERATIVE))
        self.assertIn('1\tSel\tp1\tself', report.trace.lines())
        self.assertIn('0\tSel\tp0\tos', report.trace.lines())


class EmitTests(SimpleTestCase):
    def setUp(self):
        self.report = run(parse_workload(W1_TEXT), RunOptions())

    def test_machine_row_counts(self):
        out = StringIO()
        emit(self.report, 'machine', out, 'tables')
        rows = out.getvalue().splitlines()
        self.assertEqual(sum(1 for r in rows if r.startswith('SEG\tp2\t')), 2)
        self.assertEqual(sum(1 for r in rows if r.startswith('PAGE\tp1\t')), 2)

    def test_human_mentions_every_procedure(self):
        out = StringIO()
        emit(self.report, 'human', out, 'all', audit=True)
        text = out.getvalue()
        self.assertTrue(text.strip())
        for name in ('p1', 'p2'):
            self.assertIn(name, text)
        self.assertIn('Segment tables', text)
        self.assertIn('PASS', text)

    def test_human_trace_only(self):
        text = render(self.report, 'human', 'trace')
        self.assertIn('Switch trace', text)
        self.assertNotIn('Page tables', text)

    def test_human_tables_are_aligned(self):
        lines = human_context(self.report)['procedures'].splitlines()
        self.assertEqual(lines[0].split(), ['proc', 'pid', 'size', 'time', 'prio', 'segments'])
        self.assertLessEqual(set(lines[1]), {'-', ' '})
        self.assertEqual([line.split()[:2] for line in lines[2:]], [['p1', '1'], ['p2', '2']])
        self.assertEqual(lines[2].index('1', 2), lines[0].index('pid'))
        self.assertEqual(lines[3].index('7'), lines[0].index('size'))


class WorkloadCommandTests(TestCase):
    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, text, name='case.workload'):
        path = self.tmp / name
        path.write_text(text, encoding='utf-8')
        return str(path)

    def call(self, *args):
        out, err = StringIO(), StringIO()
        call_command('workload', *args, stdout=out, stderr=err)
        return out.getvalue()

    def test_run_machine_tables_matches_golden(self):
        output = self.call('run', str(FIXTURES / 'w1.workload'), '--format', 'machine', '--emit', 'tables')
        self.assertEqual(output, W1_TABLES)

    def test_run_machine_trace_matches_golden(self):
        output = self.call('run', str(FIXTURES / 'w1.workload'), '--format', 'machine', '--emit', 'trace')
        self.assertEqual(output, W1_TRACE)

    def test_audit_rows(self):
        output = self.call('run', str(FIXTURES / 'w1.workload'), '--format', 'machine', '--audit')
        self.assertEqual(output.count('\tPASS\n'), 5)

    def test_out_file_and_hoisting(self):
        target = self.tmp / 'tables.txt'
        self.call('run', str(FIXTURES / 'w1.workload'), '--format', 'machine', '--emit', 'tables',
                  '--hoist-frames', 'on', '--out', str(target))
        self.assertEqual(target.read_text(encoding='utf-8'), W1_TABLES)

    def test_check(self):
        output = self.call('check', str(FIXTURES / 'w1.workload'))
        self.assertIn('proc p2 size=7 time=2 segs=0,3,7', output)
        self.assertIn('OK: 2 procedures', output)

    def test_exit_codes(self):
        cases = [
            ('mem 32\nvmem 64\npagee 4\n', 3),
            (HEADER + 'proc p1 size=5 segs=0,4\n', 4),
            (W1_TEXT.replace('mem 32', 'mem 8'), 5),
        ]
        for text, code in cases:
            with self.subTest(code=code), self.assertRaises(CommandError) as ctx:
                self.call('run', self.write(text))
            self.assertEqual(ctx.exception.returncode, code)

    def test_audit_failure_exit_code(self):
        with mock.patch('workload.runner.audit_partition', forced_failure):
            with self.assertRaises(CommandError) as ctx:
                self.call('run', str(FIXTURES / 'w1.workload'))
        self.assertEqual(ctx.exception.returncode, 6)
        self.assertIn('phase paging', str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(CommandError):
            self.call('check', str(self.tmp / 'nope.workload'))

    def test_save_stores_run(self):
        with mock.patch('workload.management.commands.workload.run', wraps=run) as runs:
            output = self.call('run', str(FIXTURES / 'w1.workload'), '--save', '--format', 'machine')
        self.assertEqual(runs.call_count, 1)
        record = WorkloadRun.objects.get()
        self.assertEqual(record.status, 'succeeded')
        self.assertEqual(record.name, 'w1.workload')
        self.assertEqual(record.switch_count, 6)
        self.assertTrue(record.machine_output.startswith(output))
        self.assertIn('AUDIT\tmem\tscheduling\tPASS', record.machine_output)
        self.assertTrue(record.machine_output.startswith(W1_TABLES))

    def test_save_stores_failed_run(self):
        path = self.write(W1_TEXT.replace('mem 32', 'mem 8'))
        with mock.patch('workload.management.commands.workload.run', wraps=run) as runs:
            with self.assertRaises(CommandError) as ctx:
                self.call('run', path, '--save')
        self.assertEqual(runs.call_count, 1)
        self.assertEqual(ctx.exception.returncode, 5)
        record = WorkloadRun.objects.get()
        self.assertEqual((record.status, record.failure_phase), ('failed', 'paging'))
        self.assertIn('AUDIT\tvmem\tpaging\tPASS', record.machine_output)


class WorkloadRunApiTests(TestCase):
    def post(self, payload):
        return self.client.post(reverse('workload:run_list'), data=json.dumps(payload), content_type='application/json')

    def test_post_runs_and_stores(self):
        response = self.post({'workload_text': W1_TEXT, 'name': 'w1'})
        self.assertEqual(response.status_code, 201)
        body = response.json()
        self.assertEqual(body['status'], 'succeeded')
        self.assertEqual(body['total_ticks'], 5)
        detail = self.client.get(reverse('workload:run_detail', args=[body['id']]))
        self.assertEqual(detail.json()['name'], 'w1')

    def test_invalid_workload_is_rejected(self):
        response = self.post({'workload_text': 'mem 32\nvmem 64\npagee 4\n'})
        self.assertEqual(response.status_code, 400)
        self.assertIn('line 3', response.json()['workload_text'][0])
        self.assertFalse(WorkloadRun.objects.exists())

    def test_failed_run_is_stored_and_filterable(self):
        self.post({'workload_text': W1_TEXT})
        self.post({'workload_text': W1_TEXT.replace('mem 32', 'mem 8'), 'hoist_frames': True})
        failed = self.client.get(reverse('workload:run_list'), {'status': 'failed'}).json()
        self.assertEqual(len(failed), 1)
        self.assertEqual(failed[0]['failure_phase'], 'paging')
        self.assertTrue(failed[0]['hoist_frames'])
        by_phase = self.client.get(reverse('workload:run_list'), {'failure_phase': 'paging'}).json()
        self.assertEqual(len(by_phase), 1)
        self.assertEqual(len(self.client.get(reverse('workload:run_list')).json()), 2)
