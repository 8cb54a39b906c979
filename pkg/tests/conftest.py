import pytest

from exopareto import MuscleSet, Subject, solve_cycle, synth_gait
from exopareto.energetics import muscle_metabolic_rate


@pytest.fixture(scope="session")
def subject():
    return Subject()


@pytest.fixture(scope="session")
def muscles():
    return MuscleSet.default()


@pytest.fixture(scope="session")
def gait_noload():
    return synth_gait(7, "noload")


@pytest.fixture(scope="session")
def gait_loaded():
    return synth_gait(7, "loaded")


@pytest.fixture(scope="session")
def unassisted_noload(gait_noload, muscles, subject):
    return solve_cycle(gait_noload, muscles, design=None, subject=subject)


@pytest.fixture(scope="session")
def unassisted_rate_noload(unassisted_noload):
    return muscle_metabolic_rate(unassisted_noload)
