"""Ether denominations and exact Wei arithmetic.

All ledger arithmetic happens in integer Wei; floats never touch balances
or fees.  1 Gwei = 10^9 Wei, 1 Ether = 10^18 Wei.  Display formatting
goes through :class:`decimal.Decimal` so rendered amounts are exact.
"""

from __future__ import annotations

from decimal import Decimal

WEI_PER_GWEI = 10**9
WEI_PER_ETHER = 10**18

# Balances and fees must fit an unsigned 256-bit word; exceeding it is a
# hard error, never a silent wrap.
MAX_WEI = 2**256 - 1


class WeiOverflowError(ArithmeticError):
    """An amount or product exceeded the 256-bit Wei range."""


def _check_wei(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"Wei amounts are integers, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"Wei amounts are non-negative, got {value}")
    if value > MAX_WEI:
        raise WeiOverflowError(f"amount exceeds 2**256-1 Wei: {value}")
    return value


def gwei(amount: int) -> int:
    """Exact conversion of whole Gwei to Wei."""
    return _check_wei(amount * WEI_PER_GWEI)


def ether(amount: int) -> int:
    """Exact conversion of whole Ether to Wei."""
    return _check_wei(amount * WEI_PER_ETHER)


def parse_ether(text: str) -> int:
    """Parse a decimal Ether string ("0.004") into exact Wei.

    Raises ValueError if the value does not land on an integer number of
    Wei (more than 18 fractional digits).
    """
    quantum = Decimal(text) * WEI_PER_ETHER
    wei = int(quantum)
    if wei != quantum:
        raise ValueError(f"{text} Ether is not a whole number of Wei")
    return _check_wei(wei)


def wei_to_ether(value: int) -> Decimal:
    """Exact Decimal Ether value of a Wei amount."""
    return Decimal(_check_wei(value)) / WEI_PER_ETHER


def format_ether(value: int, places: int = 8) -> str:
    """Render a Wei amount as Ether with fixed decimal places (default 8)."""
    quantum = Decimal(1).scaleb(-places)
    # f-formatting keeps zero as 0.00000000 instead of 0E-8
    return f"{wei_to_ether(value).quantize(quantum):f}"


def multiply_fee(gas_used: int, gas_price_wei: int) -> int:
    """Exact fee product gas_used * gas_price in Wei.

    Overflow past 2**256-1 raises WeiOverflowError.
    """
    if gas_used < 0:
        raise ValueError(f"gas_used is non-negative, got {gas_used}")
    _check_wei(gas_price_wei)
    return _check_wei(gas_used * gas_price_wei)
