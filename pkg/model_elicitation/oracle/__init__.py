from .base import BaseOracle, oracle_factory
from .interactive import InteractiveOracle, interactive_answer
from .simulated import SimulatedOracle, simulated_answer

__all__ = [
    "BaseOracle",
    "oracle_factory",
    "InteractiveOracle",
    "interactive_answer",
    "SimulatedOracle",
    "simulated_answer",
]
