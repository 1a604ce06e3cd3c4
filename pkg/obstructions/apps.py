from django.apps import AppConfig


class ObstructionsConfig(AppConfig):
    name = "obstructions"
