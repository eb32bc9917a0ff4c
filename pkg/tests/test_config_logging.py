import logging

import pytest

from gapcert import config_logging

MOD = "gapcert"


def logging_wrap_function(logger_object):
    logger_object.debug("A debug log")
    logger_object.info("An info log")
    logger_object.error("An error log")


@pytest.mark.parametrize(
    "loglevel,expected_messages",
    [
        ("DEBUG", ["A debug log", "An info log", "An error log"]),
        ("INFO", ["An info log", "An error log"]),
        ("ERROR", ["An error log"]),
    ],
)
def test_logger_levels(caplog, loglevel, expected_messages):
    caplog.set_level(loglevel, MOD)

    logging_wrap_function(config_logging.logger)

    assert caplog.messages == expected_messages


@pytest.mark.parametrize(
    "value,expected",
    [
        ("debug", logging.DEBUG),
        (" Warning ", logging.WARNING),
        ("15", 15),
        ("", logging.INFO),
        ("verbose", logging.INFO),
    ],
)
def test_level_from_value(value, expected):
    assert config_logging.level_from_env(value) == expected


def test_level_from_environment(monkeypatch):
    monkeypatch.setenv(config_logging.LEVEL_VARIABLE, "error")
    assert config_logging.level_from_env() == logging.ERROR
    monkeypatch.delenv(config_logging.LEVEL_VARIABLE)
    assert config_logging.level_from_env() == logging.INFO


def test_records_carry_the_logger_name():
    (handler,) = config_logging.logger.handlers
    record = logging.LogRecord(
        "gapcert", logging.WARNING, __file__, 1, "bracket too narrow", None, None
    )
    assert handler.formatter.format(record).endswith(
        "WARNING gapcert: bracket too narrow"
    )
