"""Base repository interface for data storage."""
import abc
from typing import Any, Generic, Iterable, List, Optional, TypeVar

from pydantic import BaseModel

T = TypeVar("T", bound=BaseModel)
K = TypeVar("K")

class Repository(Generic[T, K], abc.ABC):
    """Abstract base class for repositories of models T keyed by K."""

    @abc.abstractmethod
    def create(self, entity: T) -> T:
        """Create a new entity."""
        pass

    def create_many(self, entities: Iterable[T]) -> List[T]:
        """Create several entities in order."""
        return [self.create(entity) for entity in entities]

    @abc.abstractmethod
    def get(self, key: K) -> Optional[T]:
        """Get an entity by key."""
        pass

    @abc.abstractmethod
    def get_all(self) -> List[T]:
        """Get all entities."""
        pass

    @abc.abstractmethod
    def update(self, entity: T) -> T:
        """Update an entity."""
        pass

    @abc.abstractmethod
    def delete(self, key: K) -> None:
        """Delete an entity by key."""
        pass

    @abc.abstractmethod
    def search(self, **kwargs: Any) -> List[T]:
        """Search for entities based on criteria."""
        pass
