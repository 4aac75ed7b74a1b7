from django.urls import path

from workload.views import WorkloadRunDetail, WorkloadRunListCreate

app_name = 'workload'

urlpatterns = [
    path('runs/', WorkloadRunListCreate.as_view(), name='run_list'),
    path('runs/<uuid:pk>/', WorkloadRunDetail.as_view(), name='run_detail'),
]
