"""
Experiments loaded by the ExperimentManager. Each module defines one
BaseExperiment subclass.
"""
