"""Configure Django for pytest the way app/manage.py does for `manage.py test`."""

import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'app.settings')
django.setup()
