import uuid

from django.db import models

from resource_core.exceptions import ModelError

from .emit import render
from .parser import parse_workload
from .runner import PHASES, RunOptions, run


class WorkloadRun(models.Model):
    STATUS_CHOICES = [
        ('succeeded', 'Succeeded'),
        ('failed', 'Failed'),
    ]
    PHASE_CHOICES = [(phase, phase.title()) for phase in PHASES]
    MULTITASKING_CHOICES = [
        ('preemptive', 'Preemptive'),
        ('cooperative', 'Cooperative'),
    ]

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    name = models.CharField(max_length=200, blank=True)
    workload_text = models.TextField()
    hoist_frames = models.BooleanField(default=False)
    multitasking = models.CharField(max_length=20, choices=MULTITASKING_CHOICES, default='preemptive')
    status = models.CharField(max_length=20, choices=STATUS_CHOICES)
    failure_phase = models.CharField(max_length=20, choices=PHASE_CHOICES, blank=True)
    error = models.TextField(blank=True)
    machine_output = models.TextField(blank=True)
    switch_count = models.PositiveIntegerField(default=0)
    total_ticks = models.PositiveIntegerField(default=0)
    fragmentation_waste = models.PositiveIntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f'{self.name or self.id} ({self.status})'

    @classmethod
    def execute(cls, workload_text, name='', options=None):
        """Parse and run ``workload_text`` and store the outcome.

        Parse and validation errors are raised and nothing is stored. Failures
        during the run are stored with the phase they happened in.
        """
        spec = parse_workload(workload_text)
        options = options or RunOptions.from_settings()
        try:
            report = run(spec, options)
        except ModelError as exc:
            return cls.record(workload_text, options, error=exc, name=name)
        return cls.record(workload_text, options, report=report, name=name)

    @classmethod
    def record(cls, workload_text, options, report=None, error=None, name=''):
        """Store a finished run: ``report`` when it succeeded, otherwise the
        ``error`` it failed with."""
        run_record = cls(
            name=name,
            workload_text=workload_text,
            hoist_frames=options.hoist_frames,
            multitasking=options.multitasking.value,
        )
        if error is not None:
            run_record.status = 'failed'
            run_record.failure_phase = error.phase or ''
            run_record.error = str(error)
            partial = getattr(error, 'report', None)
            if partial is not None:
                run_record.machine_output = ''.join(f'{a.line()}\n' for a in partial.audits)
        else:
            run_record.status = 'succeeded'
            run_record.machine_output = render(report, 'machine', 'all', audit=True)
            run_record.switch_count = report.switch_count
            run_record.total_ticks = report.total_ticks
            run_record.fragmentation_waste = report.fragmentation_waste
        run_record.save()
        return run_record
