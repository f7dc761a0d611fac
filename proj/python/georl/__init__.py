"""Rewards, GRPO toy-policy training, data curation, and evaluation for
reasoning-driven geo-localization experiments."""

from ._georl import *  # noqa: F401,F403
