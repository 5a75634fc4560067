from celery import shared_task


@shared_task(name="model_elicitation.evaluate_seed")
def evaluate_seed(config_data, seed):
    from .experiments import ExperimentConfig
    from .experiments import evaluate_seed as run_seed

    config = ExperimentConfig.from_dict(config_data)
    return run_seed(config, seed).to_dict()


@shared_task(name="model_elicitation.run_experiment")
def run_experiment(config_data):
    from .experiments import ExperimentConfig
    from .experiments import run_experiment as run

    config = ExperimentConfig.from_dict(config_data)
    return [row.to_dict() for row in run(config)]
