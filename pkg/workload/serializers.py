from rest_framework import serializers

from .exceptions import WorkloadError
from .models import WorkloadRun
from .parser import parse_workload


class WorkloadRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = WorkloadRun
        fields = [
            'id', 'name', 'workload_text', 'hoist_frames', 'multitasking',
            'status', 'failure_phase', 'error', 'machine_output',
            'switch_count', 'total_ticks', 'fragmentation_waste', 'created_at',
        ]
        read_only_fields = [
            'status', 'failure_phase', 'error', 'machine_output',
            'switch_count', 'total_ticks', 'fragmentation_waste', 'created_at',
        ]
        extra_kwargs = {
            'hoist_frames': {'allow_null': True, 'default': None},
            'multitasking': {'allow_null': True, 'default': None},
        }

    def validate_workload_text(self, value):
        # parse errors become 400s; the run itself happens in the view
        try:
            parse_workload(value)
        except WorkloadError as exc:
            raise serializers.ValidationError(str(exc))
        return value
