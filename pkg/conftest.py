"""Configure Django before pytest collects the operator_means tests."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'reverse_amgm.settings')
django.setup()
