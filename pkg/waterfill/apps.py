from django.apps import AppConfig


class WaterfillConfig(AppConfig):
    name = 'waterfill'
    verbose_name = 'Water-filling allocation'
