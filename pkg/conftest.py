import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'emcap.settings')
django.setup()
