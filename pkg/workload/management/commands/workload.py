from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from resource_core.exceptions import Exhausted, ModelError
from workload.emit import emit
from workload.exceptions import AuditFailure, ParseError, ValidationError
from workload.models import WorkloadRun
from workload.parser import dump_workload, parse_workload
from workload.runner import RunOptions, run

EXIT_CODES = (
    (ParseError, 3),
    (ValidationError, 4),
    (Exhausted, 5),
    (AuditFailure, 6),
    (ModelError, 1),
)


def exit_code(exc):
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 1


class Command(BaseCommand):
    help = 'Run a workload file through the OS model, or check it without running'

    def add_arguments(self, parser):
        actions = parser.add_subparsers(dest='action', required=True)

        run_parser = actions.add_parser('run', help='run a workload and emit its tables and trace')
        run_parser.add_argument('workload_file')
        run_parser.add_argument('--emit', choices=['tables', 'trace', 'all'], default='all')
        run_parser.add_argument('--format', choices=['human', 'machine'], default='human')
        run_parser.add_argument('--hoist-frames', choices=['on', 'off'], default=None)
        run_parser.add_argument('--multitasking', choices=['preemptive', 'cooperative'], default=None)
        run_parser.add_argument('--audit', action='store_true', help='append the pool audits to the output')
        run_parser.add_argument('--out', default=None, help='write to this file instead of stdout')
        run_parser.add_argument('--save', action='store_true', help='store the run in the database')

        check_parser = actions.add_parser('check', help='parse and validate a workload without running it')
        check_parser.add_argument('workload_file')

    def handle(self, *args, **options):
        try:
            text = Path(options['workload_file']).read_text(encoding='utf-8')
        except OSError as exc:
            raise CommandError(str(exc))

        try:
            if options['action'] == 'check':
                self.check_workload(text)
            else:
                self.run_workload(text, options)
        except ModelError as exc:
            where = f' (phase {exc.phase})' if exc.phase else ''
            raise CommandError(f'{type(exc).__name__}{where}: {exc}', returncode=exit_code(exc))

    def check_workload(self, text):
        spec = parse_workload(text)
        self.stdout.write(dump_workload(spec), ending='')
        self.stdout.write(self.style.SUCCESS(f'OK: {len(spec.procedures)} procedures'))

    def run_workload(self, text, options):
        hoist = None if options['hoist_frames'] is None else options['hoist_frames'] == 'on'
        run_options = RunOptions.from_settings(hoist, options['multitasking'])
        spec = parse_workload(text)

        try:
            report = run(spec, run_options)
        except ModelError as exc:
            if options['save']:
                self.save_run(text, options, run_options, error=exc)
            raise
        if options['save']:
            self.save_run(text, options, run_options, report=report)

        if options['out']:
            try:
                with open(options['out'], 'w', encoding='utf-8') as out:
                    emit(report, options['format'], out, options['emit'], options['audit'])
            except OSError as exc:
                raise CommandError(str(exc))
            self.stdout.write(self.style.SUCCESS(f'Report written to {options["out"]}'))
        else:
            emit(report, options['format'], self.stdout, options['emit'], options['audit'])

    def save_run(self, text, options, run_options, **outcome):
        record = WorkloadRun.record(text, run_options, name=Path(options['workload_file']).name, **outcome)
        self.stderr.write(f'Saved run {record.id} ({record.status})', style_func=self.style.SUCCESS)
