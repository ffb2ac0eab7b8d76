import os

import hypothesis
import pytest

from services.model_service import model_service

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture
def s2():
    return model_service.builtin("S2")


@pytest.fixture
def s3():
    return model_service.builtin("S3")


@pytest.fixture
def cp2():
    return model_service.builtin("CP2")


@pytest.fixture
def data_dir():
    return model_service.data_dir
