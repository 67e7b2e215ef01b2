"""Provides line-oriented report documents."""

from collections import OrderedDict


class Report:
    """
    An ordered set of ``key: value`` lines under a title line.

    .. code-block:: python

        report = Report("iss certificate")
        report["status"] = "certified"
        report["c"] = 1.0

        print(report.render())
        # # iss certificate
        # status: certified
        # c: 1.0

    Floats are written with ``repr`` so they parse back exactly.
    """

    def __init__(self, title: str = ""):
        """Initialize an empty report."""
        self.title = title
        self._lines = OrderedDict()

    def __setitem__(self, key, value):
        """Set a line; floats are stored with ``repr``."""
        key = str(key)
        if ":" in key or "\n" in key:
            raise ValueError("report keys may not contain ':' or newlines")
        if isinstance(value, float):
            value = repr(value)
        self._lines[key] = str(value).replace("\n", " ")

    def __getitem__(self, key):
        """Get the value text of a line."""
        return self._lines[key]

    def __contains__(self, key):
        """Whether a line with ``key`` exists."""
        return key in self._lines

    def __iter__(self):
        """Iterate over ``(key, value)`` pairs."""
        for key, value in self._lines.items():
            yield key, value

    def __len__(self):
        """Number of lines."""
        return len(self._lines)

    def update(self, other: "Report", prefix: str = ""):
        """Append every line of ``other``, keys prefixed with ``prefix``."""

        for key, value in other:
            self._lines[prefix + key] = value

    def render(self) -> str:
        """Render as text, title first."""
        lines = [f"# {self.title}"] if self.title else []
        lines += [f"{key}: {value}" for key, value in self._lines.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Report":
        """Parse a rendered report."""
        report = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("# ") and not report.title and not len(report):
                report.title = line[2:]
                continue
            key, sep, value = line.partition(": ")
            if not sep:
                raise ValueError(f"malformed report line {line!r}")
            report._lines[key] = value

        return report
