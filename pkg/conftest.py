import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "deformation.settings")
django.setup()
