"""Validation and loading of operator-family and signal spec files (JSON)."""

import logging
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.sampling import multiplier as mult
from src.sampling.errors import InvalidArgumentError, SpecFileError, UnknownOperatorError
from src.sampling.multiplier import MultiplierSpec, OperatorFamily
from src.sampling.signals import BandlimitedSignal

logger = logging.getLogger(__name__)

ComplexPair = Tuple[float, float]


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class IdentityOp(_StrictModel):
    type: Literal["identity"]

    def to_spec(self) -> MultiplierSpec:
        return mult.identity()


class ShiftOp(_StrictModel):
    type: Literal["shift"]
    a: float

    def to_spec(self) -> MultiplierSpec:
        return mult.shift(self.a)


class DerivativeOp(_StrictModel):
    type: Literal["derivative"]
    order: int = Field(default=1, ge=0)
    shift: float = 0.0

    def to_spec(self) -> MultiplierSpec:
        return mult.derivative(self.order, self.shift)


class DiffQuotOp(_StrictModel):
    type: Literal["diffquot"]
    epsilon: float
    shift: float = 0.0

    def to_spec(self) -> MultiplierSpec:
        return mult.diffquot(self.epsilon, self.shift)


class PolyOp(_StrictModel):
    type: Literal["poly"]
    coeffs: List[ComplexPair] = Field(min_length=1)
    shift: float = 0.0

    def to_spec(self) -> MultiplierSpec:
        return mult.polynomial([complex(re, im) for re, im in self.coeffs], self.shift)


class TabulatedOp(_StrictModel):
    type: Literal["tabulated"]
    values: List[ComplexPair] = Field(min_length=2)

    def to_spec(self) -> MultiplierSpec:
        return mult.tabulated([complex(re, im) for re, im in self.values])


class PowerOp(_StrictModel):
    type: Literal["power"]
    base: "OperatorEntry"
    k: int = Field(ge=0)

    def to_spec(self) -> MultiplierSpec:
        return mult.power(self.base.to_spec(), self.k)


OperatorEntry = Annotated[
    Union[IdentityOp, ShiftOp, DerivativeOp, DiffQuotOp, PolyOp, TabulatedOp, PowerOp],
    Field(discriminator="type"),
]
PowerOp.model_rebuild()


class FamilyFile(_StrictModel):
    """Operator-family spec file"""

    N: int = Field(ge=1)
    rho: Optional[float] = Field(default=None, gt=0)
    delta: float = Field(default=1.0, gt=0)
    name: str = ""
    operators: List[OperatorEntry]

    def to_family(self) -> OperatorFamily:
        return OperatorFamily(
            members=tuple(op.to_spec() for op in self.operators),
            N=self.N,
            rho=self.rho,
            delta=self.delta,
            name=self.name,
        )


class SignalTerm(_StrictModel):
    c: Union[ComplexPair, float]
    x0: float

    def coefficient(self) -> complex:
        if isinstance(self.c, tuple):
            return complex(*self.c)
        return complex(self.c)


class SignalFile(_StrictModel):
    """Signal spec file: f = sum c sinc(. - x0)"""

    terms: List[SignalTerm] = Field(min_length=1)

    def to_signal(self) -> BandlimitedSignal:
        return BandlimitedSignal(tuple((t.coefficient(), t.x0) for t in self.terms))


def _raise_for(e: ValidationError, source: str):
    errors = e.errors()
    unknown = [err for err in errors if err.get("type") == "union_tag_invalid"]
    if unknown:
        tag = unknown[0].get("ctx", {}).get("tag")
        raise UnknownOperatorError(f"{source}: unknown operator type {tag!r}") from e
    first = errors[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    raise SpecFileError(f"{source}: {location or 'document'}: {first.get('msg')}") from e


def parse_family(text: str, source: str = "<string>") -> OperatorFamily:
    """Validate a family document and build the family"""
    try:
        document = FamilyFile.model_validate_json(text)
    except ValidationError as e:
        _raise_for(e, source)
    try:
        family = document.to_family()
    except InvalidArgumentError as e:
        raise SpecFileError(f"{source}: {e}") from e
    logger.info(f"Loaded family {family.name or source} with N={family.N}, rho={family.rho}")
    return family


def parse_signal(text: str, source: str = "<string>") -> BandlimitedSignal:
    """Validate a signal document and build the signal"""
    try:
        document = SignalFile.model_validate_json(text)
    except ValidationError as e:
        _raise_for(e, source)
    return document.to_signal()


def _read(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise SpecFileError(f"cannot read {path}: {e}") from e


def load_family(path: Union[str, Path]) -> OperatorFamily:
    return parse_family(_read(path), source=str(path))


def load_signal(path: Union[str, Path]) -> BandlimitedSignal:
    return parse_signal(_read(path), source=str(path))
