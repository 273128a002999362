"""Data models for instances, schedules, reports and persisted runs."""
