from django.apps import AppConfig


class ConmutacionConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'conmutacion'
    verbose_name = 'Tiempos de permanencia en sistemas conmutados'
