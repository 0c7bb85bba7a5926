"""Fee and confirmation-delay accounting over transaction logs.

Money never touches floats here.  Fees are integer Wei, USD amounts are
Decimal quantized to 6 places with banker's rounding, and ETH renders
at 8 places.  Prices form a step function over simulated time: the
quote in force for a transaction is the latest one at or before its
confirmation instant (the earliest quote covers anything before it).
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal

from .encoding import seconds_str, seconds_to_us
from .ledger import Receipt
from .units import WEI_PER_ETHER, format_ether

USD_PLACES = Decimal("0.000001")
ETH_PLACES = 8

TXLOG_CSV_HEADER = "university,gas_used,gas_price_wei,submitted_at_s,confirmed_at_s,status"
PRICES_CSV_HEADER = "at_s,usd_per_eth"


class AnalyticsError(Exception):
    pass


@dataclass(frozen=True)
class TxLogEntry:
    university: str
    gas_used: int
    gas_price_wei: int
    submitted_at_us: int
    confirmed_at_us: int
    status: str = "success"

    @property
    def fee_wei(self) -> int:
        return self.gas_used * self.gas_price_wei

    @property
    def delay_us(self) -> int:
        return self.confirmed_at_us - self.submitted_at_us


@dataclass(frozen=True)
class PriceQuote:
    at_us: int
    usd_per_eth: Decimal


def price_at(quotes: Sequence[PriceQuote], at_us: int) -> Decimal:
    """Step-function lookup: the latest quote at or before ``at_us``."""
    if not quotes:
        raise AnalyticsError("no price quotes loaded")
    ordered = sorted(quotes, key=lambda q: q.at_us)
    current = ordered[0].usd_per_eth
    for quote in ordered:
        if quote.at_us > at_us:
            break
        current = quote.usd_per_eth
    return current


def usd_cost(fee_wei: int, usd_per_eth: Decimal) -> Decimal:
    """Dollar cost of a fee at a quote, to 6 places, banker's rounding."""
    exact = Decimal(fee_wei) * usd_per_eth / WEI_PER_ETHER
    return exact.quantize(USD_PLACES, rounding=ROUND_HALF_EVEN)


@dataclass(frozen=True)
class AggregateReport:
    tx_count: int
    total_fee_wei: int
    total_delay_us: int
    total_usd: Decimal | None = None

    @property
    def avg_fee_wei(self) -> Decimal:
        if self.tx_count == 0:
            return Decimal(0)
        return Decimal(self.total_fee_wei) / self.tx_count

    @property
    def avg_delay_us(self) -> Decimal:
        if self.tx_count == 0:
            return Decimal(0)
        return Decimal(self.total_delay_us) / self.tx_count

    @property
    def avg_usd(self) -> Decimal | None:
        if self.total_usd is None:
            return None
        if self.tx_count == 0:
            return Decimal(0).quantize(USD_PLACES)
        return (self.total_usd / self.tx_count).quantize(
            USD_PLACES, rounding=ROUND_HALF_EVEN
        )


def aggregate(
    entries: Iterable[TxLogEntry],
    quotes: Sequence[PriceQuote] | None = None,
) -> AggregateReport:
    """Totals over a log slice.  USD totals sum each transaction's
    6-place dollar cost at the quote in force when it confirmed."""
    count = 0
    total_fee = 0
    total_delay = 0
    total_usd = Decimal(0) if quotes else None
    for entry in entries:
        count += 1
        total_fee += entry.fee_wei
        total_delay += entry.delay_us
        if quotes:
            total_usd += usd_cost(entry.fee_wei, price_at(quotes, entry.confirmed_at_us))
    return AggregateReport(
        tx_count=count,
        total_fee_wei=total_fee,
        total_delay_us=total_delay,
        total_usd=total_usd,
    )


def group_by_university(
    entries: Iterable[TxLogEntry],
    quotes: Sequence[PriceQuote] | None = None,
) -> dict[str, AggregateReport]:
    buckets: dict[str, list[TxLogEntry]] = {}
    for entry in entries:
        buckets.setdefault(entry.university, []).append(entry)
    return {name: aggregate(rows, quotes) for name, rows in sorted(buckets.items())}


# --- rendering -----------------------------------------------------------


def mmss(duration_us: int) -> str:
    """Whole-second minutes:seconds, e.g. 1052 s renders as 17:32."""
    seconds = int(
        (Decimal(duration_us) / 1_000_000).quantize(
            Decimal(1), rounding=ROUND_HALF_EVEN
        )
    )
    minutes, rest = divmod(seconds, 60)
    return f"{minutes}:{rest:02d}"


def format_usd(value: Decimal | None) -> str:
    if value is None:
        return "n/a"
    return f"${value.quantize(USD_PLACES, rounding=ROUND_HALF_EVEN):f}"


def format_avg_eth(report: AggregateReport) -> str:
    if report.tx_count == 0:
        return format_ether(0)
    scaled = Decimal(report.total_fee_wei) / (WEI_PER_ETHER * report.tx_count)
    quantum = Decimal(1).scaleb(-ETH_PLACES)
    return f"{scaled.quantize(quantum, rounding=ROUND_HALF_EVEN):f}"


def format_avg_delay(report: AggregateReport) -> str:
    seconds = report.avg_delay_us / 1_000_000
    return f"{seconds.quantize(Decimal('0.000001'), rounding=ROUND_HALF_EVEN):f}"


def report_lines(name: str, report: AggregateReport) -> list[str]:
    lines = [
        f"[{name}]",
        f"  transactions:  {report.tx_count}",
        f"  total delay:   {mmss(report.total_delay_us)}",
        f"  avg delay:     {format_avg_delay(report)} s",
        f"  total fee:     {format_ether(report.total_fee_wei)} ETH",
        f"  avg fee:       {format_avg_eth(report)} ETH",
    ]
    if report.total_usd is not None:
        lines.append(f"  total cost:    {format_usd(report.total_usd)}")
        lines.append(f"  avg cost:      {format_usd(report.avg_usd)}")
    return lines


def render_report(
    overall: AggregateReport,
    by_university: Mapping[str, AggregateReport] | None = None,
) -> str:
    lines = report_lines("all", overall)
    for name, report in (by_university or {}).items():
        lines.append("")
        lines.extend(report_lines(name, report))
    return "\n".join(lines) + "\n"


def report_json(
    overall: AggregateReport,
    by_university: Mapping[str, AggregateReport] | None = None,
) -> dict:
    def one(r: AggregateReport) -> dict:
        data = {
            "tx_count": r.tx_count,
            "total_fee_wei": str(r.total_fee_wei),
            "total_fee_eth": format_ether(r.total_fee_wei),
            "avg_fee_eth": format_avg_eth(r),
            "total_delay_s": seconds_str(r.total_delay_us),
            "total_delay_mmss": mmss(r.total_delay_us),
            "avg_delay_s": format_avg_delay(r),
        }
        if r.total_usd is not None:
            data["total_usd"] = f"{r.total_usd:f}"
            data["avg_usd"] = f"{r.avg_usd:f}"
        return data

    out = {"all": one(overall)}
    if by_university:
        out["by_university"] = {name: one(r) for name, r in by_university.items()}
    return out


# --- adapters and CSV I/O ------------------------------------------------


def entries_from_receipts(
    receipts: Iterable[Receipt],
    label_for_address: Mapping[bytes, str] | None = None,
) -> list[TxLogEntry]:
    labels = label_for_address or {}
    return [
        TxLogEntry(
            university=labels.get(r.sender, "0x" + r.sender.hex()),
            gas_used=r.gas_used,
            gas_price_wei=r.gas_price,
            submitted_at_us=r.submitted_at_us,
            confirmed_at_us=r.confirmed_at_us,
            status=r.status,
        )
        for r in receipts
    ]


def read_txlog_csv(path) -> list[TxLogEntry]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = TXLOG_CSV_HEADER.split(",")
        if reader.fieldnames != expected:
            raise AnalyticsError(
                f"bad txlog header {reader.fieldnames!r}, expected {expected!r}"
            )
        return [
            TxLogEntry(
                university=row["university"],
                gas_used=int(row["gas_used"]),
                gas_price_wei=int(row["gas_price_wei"]),
                submitted_at_us=seconds_to_us(row["submitted_at_s"]),
                confirmed_at_us=seconds_to_us(row["confirmed_at_s"]),
                status=row["status"],
            )
            for row in reader
        ]


def write_txlog_csv(path, entries: Iterable[TxLogEntry]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TXLOG_CSV_HEADER.split(","))
        for e in entries:
            writer.writerow(
                [
                    e.university,
                    e.gas_used,
                    e.gas_price_wei,
                    seconds_str(e.submitted_at_us),
                    seconds_str(e.confirmed_at_us),
                    e.status,
                ]
            )


def read_prices_csv(path) -> list[PriceQuote]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = PRICES_CSV_HEADER.split(",")
        if reader.fieldnames != expected:
            raise AnalyticsError(
                f"bad prices header {reader.fieldnames!r}, expected {expected!r}"
            )
        return [
            PriceQuote(
                at_us=seconds_to_us(row["at_s"]),
                usd_per_eth=Decimal(row["usd_per_eth"]),
            )
            for row in reader
        ]
