from .bad_experiment import *
