from django.contrib import admin

from .models import WorkloadRun


@admin.register(WorkloadRun)
class WorkloadRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'name', 'status', 'failure_phase', 'switch_count', 'total_ticks', 'created_at')
    list_filter = ('status', 'failure_phase', 'hoist_frames', 'multitasking')
    search_fields = ('name', 'workload_text', 'error')
    readonly_fields = ('created_at', 'machine_output')
    ordering = ('-created_at',)
