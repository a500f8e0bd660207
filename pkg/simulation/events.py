from dataclasses import asdict, dataclass
from typing import Optional


@dataclass(frozen=True)
class TraceRecord:
    """One line of a trial trace."""
    tick: int
    phase: str
    agent: Optional[int] = None
    position: Optional[int] = None
    leader: Optional[int] = None
    target: Optional[int] = None
    event: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "TraceRecord":
        return cls(
            tick=int(doc["tick"]),
            phase=str(doc["phase"]),
            agent=doc.get("agent"),
            position=doc.get("position"),
            leader=doc.get("leader"),
            target=doc.get("target"),
            event=doc.get("event"),
        )
