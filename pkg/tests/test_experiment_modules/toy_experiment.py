from base_experiment import BaseExperiment


class ToyExperiment(BaseExperiment):
    name = "toy"
    description = "Squares a few numbers, failing on negative ones."
    default_config = {
        "model": {"points": [1.0, -2.0, 3.0]},
        "numerics": {"cutoff": 4},
        "large_run": {"numerics": {"cutoff": 40}}
    }

    def validate(self):
        self.check_budget("cutoff", self.numerics.cutoff,
                          self.budgets.max_cutoff)

    @staticmethod
    def square(point):
        if point["x"] < 0:
            raise ValueError("negative input")
        return {"x": point["x"], "square": point["x"] ** 2}

    async def run(self):
        points = [{"x": x} for x in self.model.points]
        rows = await self.sweep(self.square, points, keys=("x",))
        self.write("toy.csv", ["x", "square", "error"], rows)
