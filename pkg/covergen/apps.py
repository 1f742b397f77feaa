from django.apps import AppConfig


class CovergenConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'covergen'
    verbose_name = 'Grammar coverage generation'
