"""
Журнал событий планировщика для сравнения прогонов между собой и с симулятором.
"""

from typing import Any, List, Tuple

Event = Tuple[str, int, Any]

# pid для событий, не относящихся к процессу
NO_PID = -1


class EventTrace:
    """Упорядоченный список событий (kind, pid, detail)."""

    __slots__ = ("events",)

    def __init__(self):
        self.events: List[Event] = []

    def record(self, kind: str, pid: int, detail: Any = None):
        self.events.append((kind, pid, detail))

    def kinds(self, kind: str) -> List[Event]:
        """События одного вида."""
        return [event for event in self.events if event[0] == kind]

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)
