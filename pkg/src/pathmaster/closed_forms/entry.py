from dataclasses import dataclass, field


@dataclass(frozen=True)
class ReferenceEntry:
    """A reference functional with optional generator and candidate solution.

    ``functional`` carries the exact derivatives where they are known;
    ``meta`` holds instance parameters and published target values.
    """

    id: str
    functional: object = None
    generator: object = None
    candidate: object = None
    note: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, t, mu):
        return self.functional(t, mu)
