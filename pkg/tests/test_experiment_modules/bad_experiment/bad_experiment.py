from base_experiment import BaseExperiment


class BadExperiment(BaseExperiment)
    name = "bad"
