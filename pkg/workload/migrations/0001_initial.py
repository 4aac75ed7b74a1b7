# Generated by Django 5.2.7 on 2026-10-17 09:12

import uuid

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='WorkloadRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('name', models.CharField(blank=True, max_length=200)),
                ('workload_text', models.TextField()),
                ('hoist_frames', models.BooleanField(default=False)),
                ('multitasking', models.CharField(choices=[('preemptive', 'Preemptive'), ('cooperative', 'Cooperative')], default='preemptive', max_length=20)),
                ('status', models.CharField(choices=[('succeeded', 'Succeeded'), ('failed', 'Failed')], max_length=20)),
                ('failure_phase', models.CharField(blank=True, choices=[('naming', 'Naming'), ('paging', 'Paging'), ('allocation', 'Allocation'), ('scheduling', 'Scheduling')], max_length=20)),
                ('error', models.TextField(blank=True)),
                ('machine_output', models.TextField(blank=True)),
                ('switch_count', models.PositiveIntegerField(default=0)),
                ('total_ticks', models.PositiveIntegerField(default=0)),
                ('fragmentation_waste', models.PositiveIntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
