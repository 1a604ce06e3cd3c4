from django.apps import AppConfig


class MultivectorsConfig(AppConfig):
    name = "multivectors"
