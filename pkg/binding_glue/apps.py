from django.apps import AppConfig


class BindingGlueConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'binding_glue'
