"""
Subtour Routing - vehicle routing where vehicles hand items over to subtours.
This package evaluates delivery schedules (arborescences of vehicle movements,
hand-overs and deliveries), decides whether a deadline can be met at all, and
computes cheap schedules that meet a slightly relaxed deadline.

All operations are pure functions over immutable models.
"""
__version__ = "0.3.0"
