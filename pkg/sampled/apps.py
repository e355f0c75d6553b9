from django.apps import AppConfig


class SampledConfig(AppConfig):
    name = 'sampled'
    verbose_name = 'Sampled line links'
