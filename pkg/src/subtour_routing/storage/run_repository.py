"""SQLite store for benchmark run records."""
import logging
from typing import Any, List, Optional

from sqlalchemy import select

from subtour_routing.models.db_models import DBRun, get_session_factory, init_db
from subtour_routing.models.schema import RunRecord
from subtour_routing.storage.base import Repository
from subtour_routing.utils import generate_batch_id

logger = logging.getLogger(__name__)

RECORD_FIELDS = list(RunRecord.model_fields)

class RunRepository(Repository[RunRecord, int]):
    """Repository of RunRecords; every record is stored under the repository's batch id."""

    def __init__(self, db_url: Optional[str] = None, batch_id: Optional[str] = None):
        """Initialize the repository and create tables if needed."""
        self.engine = init_db(db_url)
        self.session_factory = get_session_factory(self.engine)
        self.batch_id = batch_id or generate_batch_id()

    @staticmethod
    def _to_record(db_run: DBRun) -> RunRecord:
        return RunRecord(**{name: getattr(db_run, name) for name in RECORD_FIELDS})

    def create(self, record: RunRecord) -> RunRecord:
        """Store a record in the current batch."""
        with self.session_factory() as session:
            session.add(DBRun(batch_id=self.batch_id, **record.model_dump()))
            session.commit()
        return record

    def get(self, run_id: int) -> Optional[RunRecord]:
        """Get a record by row id."""
        with self.session_factory() as session:
            db_run = session.get(DBRun, run_id)
            return self._to_record(db_run) if db_run else None

    def get_all(self) -> List[RunRecord]:
        """All records of all batches, ordered by batch, instance id and epsilon."""
        return self.search()

    def update(self, record: RunRecord) -> RunRecord:
        """Overwrite the stored record with the same instance id and epsilon in this batch."""
        with self.session_factory() as session:
            db_run = session.scalar(
                select(DBRun).where(
                    DBRun.batch_id == self.batch_id,
                    DBRun.instance_id == record.instance_id,
                    DBRun.epsilon == record.epsilon,
                )
            )
            if db_run is None:
                raise ValueError(
                    f"No run for instance {record.instance_id} with epsilon "
                    f"{record.epsilon} in batch {self.batch_id}"
                )
            for name, value in record.model_dump().items():
                setattr(db_run, name, value)
            session.commit()
        return record

    def delete(self, run_id: int) -> None:
        """Delete a record by row id."""
        with self.session_factory() as session:
            db_run = session.get(DBRun, run_id)
            if db_run is None:
                raise ValueError(f"Run with ID {run_id} not found")
            session.delete(db_run)
            session.commit()

    def search(self, **kwargs: Any) -> List[RunRecord]:
        """Search records by batch_id, instance_id, epsilon, guarantees_ok or failed."""
        query = select(DBRun)
        if kwargs.get("batch_id") is not None:
            query = query.where(DBRun.batch_id == kwargs["batch_id"])
        if kwargs.get("instance_id") is not None:
            query = query.where(DBRun.instance_id == kwargs["instance_id"])
        if kwargs.get("epsilon") is not None:
            query = query.where(DBRun.epsilon == kwargs["epsilon"])
        if kwargs.get("guarantees_ok") is not None:
            query = query.where(DBRun.guarantees_ok == kwargs["guarantees_ok"])
        if kwargs.get("failed") is not None:
            column = DBRun.error.is_not(None)
            query = query.where(column if kwargs["failed"] else DBRun.error.is_(None))
        query = query.order_by(DBRun.batch_id, DBRun.instance_id, DBRun.epsilon)
        with self.session_factory() as session:
            return [self._to_record(db_run) for db_run in session.scalars(query)]

    def batches(self) -> List[str]:
        """Distinct batch ids, oldest first."""
        with self.session_factory() as session:
            return list(session.scalars(select(DBRun.batch_id).distinct().order_by(DBRun.batch_id)))
