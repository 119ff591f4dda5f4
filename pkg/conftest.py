import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'permanencia.settings')
django.setup()
