from django.apps import AppConfig


class CochainsConfig(AppConfig):
    name = "cochains"
