"""Line-oriented residual reports shared by the checking routines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Report:
    """Named residuals; the check passes when every residual is zero."""

    name: str
    residuals: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(_is_zero(r) for r in self.residuals.values())

    def nonzero(self) -> dict:
        return {k: r for k, r in self.residuals.items() if not _is_zero(r)}

    def witness(self):
        """Lowest grading-order nonzero term as ``(label, key, coefficient, text)``."""
        best = None
        for label, r in self.nonzero().items():
            series = getattr(r, "series", r)
            for key in sorted(series.terms):
                cand = (key[0], str(label), key)
                if best is None or cand < best[0]:
                    best = (cand, label, series, key)
                break
        if best is None:
            return None
        _, label, series, key = best
        coeff = series.terms[key]
        return label, key, coeff, series.monomial_str(key)

    def lines(self) -> list[str]:
        out = [f"{_label(k)}: {_render(r)}" for k, r in self.residuals.items()]
        out.extend(self.notes)
        return out

    def __str__(self):
        head = f"{self.name}: {'ok' if self.ok else 'FAILED'}"
        return "\n".join([head] + self.lines())


def _is_zero(r) -> bool:
    if hasattr(r, "is_zero"):
        return r.is_zero()
    return not r


def _render(r) -> str:
    return r.render() if hasattr(r, "render") else str(r)


def _label(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(i) for i in k)
    return str(k)
