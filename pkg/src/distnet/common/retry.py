"""Retry helpers for step-size control."""

from tenacity import (
    Retrying,
    retry_if_exception_type,
    stop_after_attempt,
)

from distnet.common.exceptions import ConservationError


def with_step_halving(max_halvings: int = 6) -> Retrying:
    """Build a retry controller that re-runs an integration on ConservationError.

    Each attempt is expected to use ``step / 2 ** (attempt_number - 1)``; the
    attempt number is available as ``attempt.retry_state.attempt_number``.
    The final ConservationError is re-raised unchanged.

    Args:
        max_halvings: Maximum number of halvings after the first attempt

    Example:
        ```python
        for attempt in with_step_halving(4):
            with attempt:
                k = attempt.retry_state.attempt_number - 1
                run(step / 2 ** k)
        ```
    """
    return Retrying(
        stop=stop_after_attempt(max_halvings + 1),
        retry=retry_if_exception_type(ConservationError),
        reraise=True,
    )
