"""Personalized re-ranking of entity search results with user models from chats."""

__version__ = "0.1.0"
