from django.apps import AppConfig


class ResourceCoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'resource_core'
