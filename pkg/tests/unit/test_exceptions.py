import pytest

from . import UnitTest

from psiss.exceptions import (
    ConfigError,
    DegenerateLyapunovError,
    DomainError,
    ExpressionError,
    ExpressionSyntaxError,
    GenerationError,
    InvalidFamilyError,
    InvalidSignalError,
    InversionError,
    MissingBindingError,
    OrderingError,
    PreconditionError,
    PSISSException,
    UnknownVariableError,
)


class TestPSISSException(UnitTest):
    def test_inheritance(self):
        assert issubclass(PSISSException, Exception)

    def test_catch(self):
        exception = PSISSException("test message")
        with pytest.raises(PSISSException):
            raise exception


class TestExpressionError(UnitTest):
    def test_inheritance(self):
        assert issubclass(ExpressionError, PSISSException)

    def test_catch(self):
        exception = ExpressionError("test message")
        with pytest.raises(ExpressionError):
            raise exception


class TestExpressionSyntaxError(UnitTest):
    def test_inheritance(self):
        assert issubclass(ExpressionSyntaxError, ExpressionError)

    def test_position(self):
        exception = ExpressionSyntaxError("unexpected token", 4)
        assert exception.position == 4
        assert "position 4" in str(exception)


class TestUnknownVariableError(UnitTest):
    def test_inheritance(self):
        assert issubclass(UnknownVariableError, ExpressionError)

    def test_name(self):
        exception = UnknownVariableError("x3")
        assert exception.name == "x3"
        assert "x3" in str(exception)


class TestMissingBindingError(UnitTest):
    def test_inheritance(self):
        assert issubclass(MissingBindingError, ExpressionError)

    def test_name(self):
        assert MissingBindingError("v1").name == "v1"


class TestOrderingError(UnitTest):
    def test_inheritance(self):
        assert issubclass(OrderingError, InvalidSignalError)
        assert issubclass(InvalidSignalError, PSISSException)

    def test_catch(self):
        with pytest.raises(InvalidSignalError):
            raise OrderingError("test message")


class TestConfigError(UnitTest):
    def test_inheritance(self):
        assert issubclass(ConfigError, PSISSException)

    def test_errors(self):
        exception = ConfigError(["family: missing", "signal.modes[2]: unknown"])
        assert exception.errors == ["family: missing", "signal.modes[2]: unknown"]
        assert str(exception) == "family: missing; signal.modes[2]: unknown"


@pytest.mark.parametrize(
    "exception",
    [
        DomainError,
        InvalidFamilyError,
        DegenerateLyapunovError,
        InversionError,
        GenerationError,
        PreconditionError,
    ],
)
def test_library_errors_are_psiss_exceptions(exception):
    assert issubclass(exception, PSISSException)
    with pytest.raises(PSISSException):
        raise exception("test message")
