from django.apps import AppConfig


class AllocatorsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'allocators'
