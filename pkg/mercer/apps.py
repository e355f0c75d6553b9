from django.apps import AppConfig


class MercerConfig(AppConfig):
    name = 'mercer'
    verbose_name = 'Mercer expansions'
