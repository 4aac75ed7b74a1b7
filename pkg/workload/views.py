from rest_framework import generics, status
from rest_framework.response import Response

from .models import WorkloadRun
from .runner import RunOptions
from .serializers import WorkloadRunSerializer


class WorkloadRunListCreate(generics.ListCreateAPIView):
    """GET lists stored runs, POST runs a workload and stores the outcome."""

    queryset = WorkloadRun.objects.all()
    serializer_class = WorkloadRunSerializer
    filterset_fields = ['status', 'failure_phase']

    def create(self, request, *args, **kwargs):
        serializer = self.get_serializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        options = RunOptions.from_settings(data.get('hoist_frames'), data.get('multitasking'))
        record = WorkloadRun.execute(data['workload_text'], name=data.get('name', ''), options=options)
        return Response(self.get_serializer(record).data, status=status.HTTP_201_CREATED)


class WorkloadRunDetail(generics.RetrieveAPIView):
    queryset = WorkloadRun.objects.all()
    serializer_class = WorkloadRunSerializer
