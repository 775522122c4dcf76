from django.apps import AppConfig


class SimworldConfig(AppConfig):
    name = 'simworld'
