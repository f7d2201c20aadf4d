from django.apps import AppConfig


class OperatorMeansConfig(AppConfig):
    name = 'operator_means'
    verbose_name = 'Operator means and reverse AM-GM inequalities'
