"""Common/Combined Log Format parsing and sessionization.

Records are read field by field so that a malformed line can be reported with
the first field that failed to parse.  Event tokens are request paths
(query string stripped by default, whitespace percent-encoded) and sessions
are split on inactivity gaps between kept hits of the same visitor key.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .wasd import EventDictionary, WasDatabase

log = logging.getLogger(__name__)

FORMATS = ("clf", "combined")

DEFAULT_EXCLUDED_EXTENSIONS = frozenset({"gif", "jpg", "jpeg", "png", "ico", "css", "js", "bmp", "swf"})

_MONTHS = {m: i for i, m in enumerate(
    ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"], start=1)}

_TOKEN = re.compile(r"\S+")
_SPACE = re.compile(r"[ \t]+")
_STAMP = re.compile(r"\[(\d{2})/([A-Z][a-z]{2})/(\d{4}):(\d{2}):(\d{2}):(\d{2}) ([+-])(\d{2})(\d{2})\]")
_QUOTED = re.compile(r'"((?:[^"\\]|\\.)*)"')
_STATUS = re.compile(r"[1-5]\d{2}(?=\s|$)")
_BYTES = re.compile(r"(\d+|-)(?=\s|$)")
_WS_IN_PATH = re.compile(r"\s")


class LogParseError(ValueError):
    def __init__(self, field_name: str, line_number: Optional[int] = None, detail: str = "") -> None:
        where = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{where}bad {field_name}{': ' + detail if detail else ''}")
        self.field = field_name
        self.line_number = line_number


@dataclass(frozen=True)
class LogRecord:
    host: str
    ident: str
    authuser: str
    timestamp: int  # seconds since the epoch, UTC
    utc_offset: int  # seconds east of UTC as written in the log
    method: str
    path: str
    protocol: str
    status: int
    bytes: Optional[int] = None
    referrer: Optional[str] = None
    user_agent: Optional[str] = None


@dataclass(frozen=True)
class SessionConfig:
    timeout: float = 1800
    key_mode: str = "host+agent"  # or "host"
    strip_query: bool = True
    exclude_extensions: FrozenSet[str] = DEFAULT_EXCLUDED_EXTENSIONS
    status_range: Tuple[int, int] = (200, 399)
    methods_kept: FrozenSet[str] = frozenset({"GET"})

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.status_range[0] > self.status_range[1]:
            raise ValueError("status_range low must not exceed high")
        if self.key_mode not in ("host", "host+agent"):
            raise ValueError(f"unknown key_mode {self.key_mode!r}")
        object.__setattr__(self, "exclude_extensions", frozenset(x.lower().lstrip(".") for x in self.exclude_extensions))
        object.__setattr__(self, "methods_kept", frozenset(self.methods_kept))


class _Cursor:
    def __init__(self, line: str, line_number: Optional[int]) -> None:
        self.line = line
        self.pos = 0
        self.line_number = line_number

    def _skip_space(self, field_name: str, required: bool = True) -> None:
        m = _SPACE.match(self.line, self.pos)
        if m:
            self.pos = m.end()
        elif required and self.pos > 0:
            raise LogParseError(field_name, self.line_number, "missing separator")

    def take(self, pattern: re.Pattern, field_name: str) -> re.Match:
        self._skip_space(field_name)
        m = pattern.match(self.line, self.pos)
        if m is None:
            raise LogParseError(field_name, self.line_number)
        self.pos = m.end()
        return m

    def at_end(self) -> bool:
        return not self.line[self.pos:].strip()


def _dash(value: str) -> Optional[str]:
    return None if value == "-" else value


def _unescape(value: str) -> str:
    return value.replace('\\"', '"').replace("\\\\", "\\")


def parse_timestamp(text: str) -> Tuple[int, int]:
    """``[10/Oct/2000:13:55:36 -0700]`` to (UTC epoch seconds, offset seconds)."""
    m = _STAMP.fullmatch(text)
    if m is None or m.group(2) not in _MONTHS:
        raise ValueError(f"bad timestamp {text!r}")
    day, mon, year, hh, mm, ss, sign, oh, om = m.groups()
    offset = (int(oh) * 3600 + int(om) * 60) * (1 if sign == "+" else -1)
    local = datetime(int(year), _MONTHS[mon], int(day), int(hh), int(mm), int(ss),
                     tzinfo=timezone(timedelta(seconds=offset)))
    return int(local.timestamp()), offset


def _split_request(request: str) -> Tuple[str, str, str]:
    parts = request.split()
    if not parts or request == "-":
        return "", "", ""
    if len(parts) == 1:
        return parts[0], "", ""
    if len(parts) >= 3 and parts[-1].upper().startswith("HTTP/"):
        return parts[0], " ".join(parts[1:-1]), parts[-1]
    return parts[0], " ".join(parts[1:]), ""


def parse_log_line(line: str, format: str = "clf", line_number: Optional[int] = None) -> LogRecord:
    """Parse one Common (``clf``) or Combined (``combined``) log line."""
    if format not in FORMATS:
        raise ValueError(f"unknown log format {format!r}")
    cur = _Cursor(line.rstrip("\r\n"), line_number)
    host = cur.take(_TOKEN, "host").group()
    ident = cur.take(_TOKEN, "ident").group()
    authuser = cur.take(_TOKEN, "authuser").group()
    stamp = cur.take(_STAMP, "timestamp").group()
    try:
        timestamp, offset = parse_timestamp(stamp)
    except ValueError as exc:
        raise LogParseError("timestamp", line_number, str(exc)) from None
    request = _unescape(cur.take(_QUOTED, "request").group(1))
    status = int(cur.take(_STATUS, "status").group())
    size = cur.take(_BYTES, "bytes").group(1)
    referrer = agent = None
    if format == "combined":
        referrer = _dash(_unescape(cur.take(_QUOTED, "referrer").group(1)))
        agent = _dash(_unescape(cur.take(_QUOTED, "user_agent").group(1)))
    if not cur.at_end():
        raise LogParseError("trailing data", line_number)

    method, path, protocol = _split_request(request)
    return LogRecord(
        host=host,
        ident=ident,
        authuser="" if authuser == "-" else authuser,
        timestamp=timestamp,
        utc_offset=offset,
        method=method,
        path=path,
        protocol=protocol,
        status=status,
        bytes=None if size == "-" else int(size),
        referrer=referrer,
        user_agent=agent,
    )


@dataclass
class ParseReport:
    records: List[LogRecord] = field(default_factory=list)
    errors: List[LogParseError] = field(default_factory=list)
    lines: int = 0


def parse_log(lines: Iterable[str], format: str = "clf", strict: bool = False) -> ParseReport:
    """Parse many lines; bad lines are collected unless ``strict``."""
    report = ParseReport()
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        report.lines += 1
        try:
            report.records.append(parse_log_line(line, format, n))
        except LogParseError as exc:
            if strict:
                raise
            report.errors.append(exc)
    if report.errors:
        log.warning("skipped %d unparseable log lines", len(report.errors))
    return report


# ---------------------------------------------------------------------------


def _url(path: str) -> str:
    return path.split("?", 1)[0].split("#", 1)[0]


def extension_of(path: str) -> Optional[str]:
    """Lowercase file extension of the last path segment, if it has one."""
    last = _url(path).rsplit("/", 1)[-1]
    if "." not in last.strip("."):
        return None
    ext = last.rsplit(".", 1)[1].lower()
    return ext or None


def normalize_event(record: LogRecord, config: SessionConfig = SessionConfig()) -> Optional[str]:
    """Event token for ``record``, or ``None`` when the hit is skipped."""
    if record.method not in config.methods_kept:
        return None
    lo, hi = config.status_range
    if not lo <= record.status <= hi:
        return None
    if not record.path:
        return None
    if extension_of(record.path) in config.exclude_extensions:
        return None
    token = _url(record.path) if config.strip_query else record.path
    token = _WS_IN_PATH.sub(lambda m: "%{:02X}".format(ord(m.group())), token)
    if token.startswith("#"):
        token = "%23" + token[1:]
    return token or None


def session_key(record: LogRecord, config: SessionConfig) -> Tuple[str, str]:
    if config.key_mode == "host":
        return (record.host, "")
    return (record.host, record.user_agent or "")


def sessionize(
    records: Iterable[LogRecord],
    config: SessionConfig = SessionConfig(),
    dictionary: Optional[EventDictionary] = None,
) -> WasDatabase:
    """Group hits into visitor sessions ordered by timestamp.

    Skipped hits are removed before gaps are measured.  Ties on (key, time)
    keep input order.  Sessions are emitted ordered by key, then start time.
    """
    kept = []
    for index, record in enumerate(records):
        token = normalize_event(record, config)
        if token is not None:
            kept.append((session_key(record, config), record.timestamp, index, token))
    kept.sort(key=lambda item: item[:3])

    dictionary = dictionary if dictionary is not None else EventDictionary()
    sequences: List[Tuple[int, ...]] = []
    current: List[int] = []
    last_key = last_time = None
    for key, ts, _, token in kept:
        if current and (key != last_key or ts - last_time > config.timeout):
            sequences.append(tuple(current))
            current = []
        current.append(dictionary.intern(token))
        last_key, last_time = key, ts
    if current:
        sequences.append(tuple(current))
    return WasDatabase(tuple(sequences), dictionary)


@dataclass(frozen=True)
class LogStats:
    entries: int
    unique_hosts: int
    unique_urls: int
    unique_extensions: int

    def lines(self) -> List[str]:
        return [
            f"entries\t{self.entries}",
            f"unique_hosts\t{self.unique_hosts}",
            f"unique_urls\t{self.unique_urls}",
            f"unique_extensions\t{self.unique_extensions}",
        ]


def log_stats(records: Iterable[LogRecord]) -> LogStats:
    """Distinct counts over parsed records, before any filtering.

    A URL is the request path without query string; extensions are counted
    over URLs that have one.
    """
    n = 0
    hosts, urls, exts = set(), set(), set()
    for r in records:
        n += 1
        hosts.add(r.host)
        url = _url(r.path)
        urls.add(url)
        ext = extension_of(url)
        if ext:
            exts.add(ext)
    return LogStats(n, len(hosts), len(urls), len(exts))
