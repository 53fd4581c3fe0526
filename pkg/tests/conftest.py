import pytest

import synth


@pytest.fixture
def g1():
    return synth.g1()


@pytest.fixture
def sink_source():
    return synth.sink_source_graph()


@pytest.fixture
def weighted_loop():
    return synth.weighted_loop_graph()
