"""SQLAlchemy database models for persisted benchmark runs."""
import datetime
from typing import Optional

from sqlalchemy import (Boolean, Column, DateTime, Float, Integer, String, Text,
                        UniqueConstraint, create_engine)
from sqlalchemy.orm import declarative_base, sessionmaker

from subtour_routing.config import config

# Create base class for SQLAlchemy models
Base = declarative_base()

class DBRun(Base):
    """Database model for one benchmark run (an instance solved with one epsilon)."""
    __tablename__ = "runs"
    id = Column(Integer, primary_key=True, autoincrement=True)
    batch_id = Column(String(64), nullable=False, index=True)
    instance_id = Column(String(255), nullable=False, index=True)
    epsilon = Column(Float, nullable=False)
    n = Column(Integer, nullable=False, default=0)
    delay = Column(Float, nullable=False, default=0.0)
    deadline = Column(Float, nullable=False, default=0.0)
    travel = Column(Float, nullable=False, default=0.0)
    mst = Column(Float, nullable=False, default=0.0)
    vehicles = Column(Integer, nullable=False, default=0)
    cost = Column(Float, nullable=False, default=0.0)
    cost_lb = Column(Float, nullable=False, default=0.0)
    delay_ratio = Column(Float, nullable=False, default=0.0)
    length_ratio = Column(Float, nullable=False, default=0.0)
    cost_ratio = Column(Float, nullable=False, default=0.0)
    guarantees_ok = Column(Boolean, nullable=False, default=False)
    wall_time = Column(Float, nullable=False, default=0.0)
    error = Column(Text, nullable=True)
    created_at = Column(DateTime, default=datetime.datetime.now, nullable=False)

    # One row per (batch, instance, epsilon)
    __table_args__ = (
        UniqueConstraint("batch_id", "instance_id", "epsilon", name="unique_run"),
    )

    def __repr__(self) -> str:
        """Return string representation of a run."""
        return (
            f"<Run(batch='{self.batch_id}', instance='{self.instance_id}', "
            f"epsilon={self.epsilon})>"
        )

def init_db(db_url: Optional[str] = None):
    """Initialize the database and return its engine."""
    engine = create_engine(db_url or config.get_db_url())
    Base.metadata.create_all(engine)
    return engine

def get_session_factory(engine=None):
    """Get a session factory for the database."""
    if engine is None:
        engine = create_engine(config.get_db_url())
    return sessionmaker(bind=engine)
