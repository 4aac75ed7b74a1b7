from django.apps import AppConfig


class PagingSegmentationConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'paging_segmentation'
